// C API shim: translates the exception-based C++ core into status codes
// plus a thread-local message, and hides the evaluator machinery behind an
// opaque state handle.

#include "ccs/ccs.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "errors.hpp"
#include "free_particle.hpp"
#include "gk_verify.hpp"
#include "hilbert.hpp"
#include "iho.hpp"

using namespace ccs;

namespace {

thread_local std::string g_last_error;

ccs_status fail(ccs_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename F>
ccs_status guarded(F&& f) {
  try {
    f();
    return CCS_OK;
  } catch (const Error& e) {
    return fail(static_cast<ccs_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::exception& e) {
    return fail(CCS_ERR_INTERNAL, e.what());
  }
}

struct FamilyView {
  bool iho = false;
  freepart::FiducialParams fp;
  double ebar = 1.0, A = 1.0;
  hilbert::PhysicalParams phys;
};

FamilyView parse_family(const ccs_family* f) {
  if (!f) throw InvalidArgument("capi: null family");
  FamilyView v;
  const std::string sys = f->system ? f->system : "";
  if (sys == "iho") {
    v.iho = true;
    v.ebar = f->ebar;
    v.A = f->A;
    return v;
  }
  if (sys != "free") throw InvalidArgument("capi: unknown system '" + sys +
                                           "' (expected free or iho)");
  const std::string sch = f->scheme ? f->scheme : "";
  if (sch == "window")
    v.fp.family = freepart::Family::window;
  else if (sch == "gaussian")
    v.fp.family = freepart::Family::gaussian;
  else if (sch == "bump")
    v.fp.family = freepart::Family::bump;
  else
    throw InvalidArgument("capi: unknown scheme '" + sch +
                          "' (expected window, gaussian or bump)");
  v.fp.k0 = f->k0;
  v.fp.k1 = f->k1;
  v.fp.kbar = f->kbar;
  v.fp.A = f->A;
  v.phys.hbar = f->hbar;
  v.phys.mass = f->mass;
  hilbert::validate(v.phys);
  return v;
}

gk::FamilySpec to_spec(const FamilyView& v) {
  gk::FamilySpec fs;
  if (v.iho) {
    fs.id = gk::FamilyId::iho;
    fs.Ebar = v.ebar;
    fs.A = v.A;
    return fs;
  }
  switch (v.fp.family) {
    case freepart::Family::window: fs.id = gk::FamilyId::free_window; break;
    case freepart::Family::gaussian:
      fs.id = gk::FamilyId::free_gaussian;
      break;
    case freepart::Family::bump: fs.id = gk::FamilyId::free_bump; break;
  }
  fs.k0 = v.fp.k0;
  fs.k1 = v.fp.k1;
  fs.kbar = v.fp.kbar;
  fs.A = v.fp.A;
  fs.phys = v.phys;
  return fs;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct ccs_state {
  FamilyView fam;
  hilbert::PhaseLabel label;
  hilbert::StateEvaluator ev;
};

extern "C" {

const char* ccs_last_error(void) { return g_last_error.c_str(); }

const char* ccs_version(void) { return "ccs 1.0.0"; }

void ccs_family_init(ccs_family* f) {
  if (!f) return;
  f->system = "free";
  f->scheme = "gaussian";
  f->k0 = -2.5;
  f->k1 = 2.5;
  f->kbar = 1.0;
  f->A = 1.0;
  f->ebar = 1.0;
  f->hbar = 1.0;
  f->mass = 1.0;
}

ccs_status ccs_state_create(const ccs_family* f, double q, double p,
                            double tau, ccs_state** out) {
  return guarded([&] {
    if (!out) throw InvalidArgument("capi: null output handle");
    auto s = std::make_unique<ccs_state>();
    s->fam = parse_family(f);
    s->label = {q, p, tau};
    if (s->fam.iho) {
      s->ev = iho::iho_coherent(s->fam.ebar, s->fam.A, s->label);
    } else if (tau == 0.0) {
      s->ev = freepart::coherent_state(freepart::fiducial(s->fam.fp),
                                       s->label, s->fam.phys);
    } else {
      switch (s->fam.fp.family) {
        case freepart::Family::window:
          s->ev = freepart::evolve_window(s->fam.fp.k0, s->fam.fp.k1,
                                          {q, p, 0.0}, tau, s->fam.phys);
          break;
        case freepart::Family::gaussian:
          s->ev = freepart::evolve_gaussian(s->fam.fp.kbar, s->fam.fp.A,
                                            {q, p, 0.0}, tau, s->fam.phys);
          break;
        case freepart::Family::bump:
          throw InvalidArgument(
              "capi: bump family has no closed-form evolution (tau must be "
              "0)");
      }
    }
    *out = s.release();
  });
}

void ccs_state_destroy(ccs_state* s) { delete s; }

ccs_status ccs_state_eval(const ccs_state* s, double x, double* re,
                          double* im) {
  return guarded([&] {
    if (!s || !re || !im) throw InvalidArgument("capi: null argument");
    const num::cplx v = s->ev.amplitude(x);
    *re = v.real();
    *im = v.imag();
  });
}

ccs_status ccs_state_norm(const ccs_state* s, double* out) {
  return guarded([&] {
    if (!s || !out) throw InvalidArgument("capi: null argument");
    if (s->fam.iho) {
      *out = iho::iho_norm(s->fam.ebar, s->fam.A, s->label);
      return;
    }
    // momentum-space route: the window family's oscillatory 1/x^2 tails
    // stall the x-space quadrature below 1e-8
    const hilbert::PhaseLabel l{s->label.q, s->label.p, 0.0};
    const num::cplx o =
        freepart::k_overlap(s->fam.fp, l, s->label.tau, l, s->label.tau,
                            s->fam.phys);
    *out = std::sqrt(std::abs(o));
  });
}

ccs_status ccs_state_moment_q(const ccs_state* s, int order, double* out) {
  return guarded([&] {
    if (!s || !out) throw InvalidArgument("capi: null argument");
    *out = hilbert::moment_Q(s->ev, order);
  });
}

ccs_status ccs_state_moment_p(const ccs_state* s, int order, double* out) {
  return guarded([&] {
    if (!s || !out) throw InvalidArgument("capi: null argument");
    const double hbar = s->fam.iho ? 1.0 : s->fam.phys.hbar;
    *out = hilbert::moment_P(s->ev, order, hbar);
  });
}

ccs_status ccs_state_energy(const ccs_state* s, double* out) {
  return guarded([&] {
    if (!s || !out) throw InvalidArgument("capi: null argument");
    *out = s->fam.iho
               ? iho::iho_energy_x(s->fam.ebar, s->fam.A, s->label)
               : freepart::energy_expectation(s->fam.fp, s->label,
                                              s->fam.phys);
  });
}

ccs_status ccs_axiom_check(const ccs_family* f, const char* axiom,
                           char** json, int* pass_out) {
  return guarded([&] {
    if (!axiom || !json) throw InvalidArgument("capi: null argument");
    const auto r = gk::default_check(to_spec(parse_family(f)), axiom);
    *json = dup_string(r.to_json());
    if (pass_out) *pass_out = r.pass ? 1 : 0;
  });
}

ccs_status ccs_axiom_suite(const ccs_family* f, char** json, int* npass,
                           int* nfail) {
  return guarded([&] {
    if (!json) throw InvalidArgument("capi: null argument");
    const auto reports = gk::axiom_suite(to_spec(parse_family(f)));
    std::string s = "[";
    int pass = 0, failcount = 0;
    for (size_t i = 0; i < reports.size(); ++i) {
      if (i) s += ",";
      s += reports[i].to_json();
      (reports[i].pass ? pass : failcount) += 1;
    }
    s += "]";
    *json = dup_string(s);
    if (npass) *npass = pass;
    if (nfail) *nfail = failcount;
  });
}

void ccs_string_free(char* s) { std::free(s); }

ccs_status ccs_stability(const ccs_family* f, double q, double p, double tau,
                         double ktilde, double* measured, double* predicted) {
  return guarded([&] {
    if (!measured || !predicted) throw InvalidArgument("capi: null argument");
    const auto v = parse_family(f);
    if (v.iho) {
      *measured = iho::stability_deviation_x(v.ebar, v.A, tau);
      *predicted = tau * tau / (4.0 * v.A);
      return;
    }
    const auto [m, pred] =
        freepart::stability_deviation(v.fp, {q, p, 0.0}, tau, ktilde, v.phys);
    *measured = m;
    *predicted = pred.remainder_norm_sq;
  });
}

ccs_status ccs_action_solve(const ccs_family* f, double J, double omega,
                            double* q, double* p, double* energy) {
  return guarded([&] {
    if (!q || !p || !energy) throw InvalidArgument("capi: null argument");
    const auto v = parse_family(f);
    if (v.iho) {
      const auto sys = iho::action_system_solve(v.ebar, v.A, J, omega);
      *q = sys.solution.q;
      *p = sys.solution.p;
      *energy = iho::iho_energy_x(v.ebar, v.A, sys.solution);
      return;
    }
    const auto label = freepart::action_invert(v.fp, J, omega, v.phys);
    *q = label.q;
    *p = label.p;
    *energy = freepart::energy_expectation(v.fp, label, v.phys);
  });
}

}  // extern "C"
