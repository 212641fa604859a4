/* C interface to the coherent-state library: fiducial and coherent-state
 * evaluators for the free-particle families (sharp window, Gaussian, bump)
 * and the inverted-oscillator continuum construction, position/momentum
 * moments with tail diagnosis, the five-axiom verification reports (JSON),
 * stability deviations and action-angle inversion.
 *
 * All functions return a ccs_status; outputs go through pointers. On any
 * nonzero status a thread-local message is available via ccs_last_error().
 * Handles are opaque; every ccs_state obtained from a _create call must be
 * released with ccs_state_destroy. All operations are pure and reentrant;
 * distinct handles may be used from different threads concurrently.
 */
#ifndef CCS_H
#define CCS_H

#ifdef __cplusplus
extern "C" {
#endif

#define CCS_API __attribute__((visibility("default")))

typedef enum {
  CCS_OK = 0,
  CCS_ERR_INVALID_ARGUMENT = 1,
  CCS_ERR_NON_CONVERGENCE = 2,
  CCS_ERR_NON_FINITE = 3,
  CCS_ERR_DOMAIN = 4,          /* e.g. Q-moments of the window family */
  CCS_ERR_POLE = 5,
  CCS_ERR_STEP_UNDERFLOW = 6,
  CCS_ERR_OUT_OF_RANGE = 7,    /* parameter or label outside the boxes */
  CCS_ERR_BELOW_GROUND_ACTION = 8,
  CCS_ERR_NOT_NORMALIZED = 9,
  CCS_ERR_INTERNAL = 100
} ccs_status;

/* Message for the most recent failure on this thread ("" if none). The
 * pointer stays valid until the next failing call on the same thread. */
CCS_API const char* ccs_last_error(void);

CCS_API const char* ccs_version(void);

/* Family selection. system: "free" or "iho". scheme (free only): "window",
 * "gaussian" or "bump". The iho construction uses units 2m = hbar = 1 and
 * ignores scheme/hbar/mass. */
typedef struct {
  const char* system;
  const char* scheme;
  double k0, k1;     /* window / bump spectral edges */
  double kbar, A;    /* gaussian center and regularization; A also iho */
  double ebar;       /* iho energy center */
  double hbar, mass; /* free-particle physical constants */
} ccs_family;

/* Fills defaults: free gaussian, k0=-2.5 k1=2.5, kbar=1 A=1, ebar=1,
 * hbar=mass=1. */
CCS_API void ccs_family_init(ccs_family* f);

typedef struct ccs_state ccs_state;

/* Coherent state |q, p, tau> of the family (tau = evolution time; the
 * fiducial is q = p = tau = 0). Bump states support tau = 0 only. */
CCS_API ccs_status ccs_state_create(const ccs_family* f, double q, double p,
                                    double tau, ccs_state** out);
CCS_API void ccs_state_destroy(ccs_state* s);

/* Wavefunction at x. */
CCS_API ccs_status ccs_state_eval(const ccs_state* s, double x, double* re,
                                  double* im);
/* L2 norm by adaptive quadrature over the real line. */
CCS_API ccs_status ccs_state_norm(const ccs_state* s, double* out);
/* <Q^order> (order 1 or 2); CCS_ERR_DOMAIN when the tail diagnosis shows
 * non-integrability (window family). */
CCS_API ccs_status ccs_state_moment_q(const ccs_state* s, int order,
                                      double* out);
/* <P^order> (order 1 or 2). */
CCS_API ccs_status ccs_state_moment_p(const ccs_state* s, int order,
                                      double* out);
/* <H> through the family's closed form (free) or x-space quadrature (iho). */
CCS_API ccs_status ccs_state_energy(const ccs_state* s, double* out);

/* One axiom check with the family's default probes. axiom is one of
 * "normalization", "continuity", "identity_resolution",
 * "temporal_stability", "action_identity". *json receives a malloc'd JSON
 * object {axiom, family, params, measured, predicted, tolerance, pass,
 * diagnostics, seed}; release with ccs_string_free. pass_out may be NULL. */
CCS_API ccs_status ccs_axiom_check(const ccs_family* f, const char* axiom,
                                   char** json, int* pass_out);
/* All checks for the family (two for bump, five otherwise) as a JSON
 * array; *npass/*nfail may be NULL. */
CCS_API ccs_status ccs_axiom_suite(const ccs_family* f, char** json,
                                   int* npass, int* nfail);
CCS_API void ccs_string_free(char* s);

/* Phase-minimized temporal-stability deviation of |q,p,0> evolved by tau
 * against the closed-form remainder. ktilde: reference wavenumber for the
 * window family (pass the midpoint for the ell = 0 case); ignored by the
 * other families. */
CCS_API ccs_status ccs_stability(const ccs_family* f, double q, double p,
                                 double tau, double ktilde, double* measured,
                                 double* predicted);

/* Solve <H>(q(J), p(J)) = omega J for the label on the classical ray
 * q = p cot(omega); returns the label and the achieved <H>. */
CCS_API ccs_status ccs_action_solve(const ccs_family* f, double J,
                                    double omega, double* q, double* p,
                                    double* energy);

#ifdef __cplusplus
}
#endif

#endif /* CCS_H */
