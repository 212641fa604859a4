/*
 * Inverted harmonic oscillator in units 2m = hbar = 1, H = P^2 - Q^2/4.
 *
 * The fiducial is a Gaussian energy packet over the delta-orthonormal
 * continuum psi_E = c0(E) W(E, x). States are represented spectrally on
 * Gauss-Hermite nodes E_j with shared Weber tables on |x| <= 70; every
 * x-space integral splits into a Simpson sum over the tables plus analytic
 * tail integrals in s = ln|x| built from the asymptotic form
 *
 *   W(E, +x) ~ sqrt(2 kappa) x^{-1/2} cos(Theta + beta_E(s)),
 *   W(E, -x) ~ sqrt(2/kappa) x^{-1/2} sin(Theta + beta_E(s)),
 *   Theta = x^2/4 + pi/4,   beta_E(s) = E s + phi(E)/2 + xi_E(s),
 *
 * so a state's tail is x^{-1/2} [e^{i Theta} H(s) + e^{-i Theta} conj(Ht(s))]/2
 * on the plus side (and the sin analogue on the minus side) with the slowly
 * varying node sums
 *
 *   H(s)  = sum_j d_j      kappa_j^{s/2} rho_j(s) e^{i beta_j(s)},
 *   Ht(s) = sum_j conj(d_j) ... (same factors).
 *
 * Bilinear tails then have a slow part, integrated adaptively in s, and fast
 * e^{+-2i Theta} parts reduced to endpoint (stationary-phase) corrections.
 * The |x|-densities are log-normal in s, so the slow integrals run out to
 * s ~ m A + 6 sqrt(A) for the m-th moment. Two node sets per basis: a table
 * set sized for the numeric window |x| <= 70 (Weber sweeps are the cost), and
 * a dense 192-node tail set with no tables, whose H(s) tracks the adaptive
 * continuum integral to the absolute double-precision floor across the whole
 * parameter box (a sparser rule aliases: its node sum stops decaying like
 * e^{-s^2/(4A)} and the e^{ms} moment weight amplifies the floor). Depths past
 * 11.5 sqrt(A), where even exact arithmetic of the cancellation would drown
 * in roundoff, throw NonConvergence.
 */
#include "iho.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "errors.hpp"
#include "weber.hpp"

namespace ccs::iho {

namespace {

constexpr double kL = 70.0;       // Weber table half-width
constexpr double kH = 0.005;      // table step
constexpr int kNpts = 28001;      // 2 kL / kH + 1
constexpr double kXsplit = 60.0;  // tail split when labels differ
constexpr double kEmin = -6.0, kEmax = 10.0;
constexpr double kBoxQ = 8.0, kBoxP = 8.0, kBoxT = 3.0;
constexpr int kTailN = 192;  // dense tail rule (256 degenerates numerically)

double sq(double x) { return x * x; }

// Required s-reach for the m-th |x|-moment: the density e^{ms - s^2/(2A)}
// peaks at mA with width sqrt(A); +|T| covers the drift of an evolved packet.
double s_required(int m, double A, double T) {
  return m * A + 6.0 * std::sqrt(A) + 2.0 + std::abs(T);
}

// Depth where the coherent e^{-s^2/(4A)} cancellation of the node sums
// reaches the double-precision floor.
double noise_floor_s(double A) { return 11.5 * std::sqrt(A); }

// Table node count: sized so the GH sum resolves the sharp e^{-pi E} factors
// of c0/kappa within the window (the sum must match the continuum integral to
// ~1e-6 relative out to s = ln 70; small A squeezes the Gaussian against that
// structure and needs more nodes).
int n_interior(double A) {
  if (A < 2.0) return 96;
  if (A < 5.0) return 64;
  if (A < 15.0) return 48;
  return 32;
}

struct NodeSet {
  int n = 0;
  std::vector<double> E, w, c;     // nodes, GH weights, fiducial coefficients
  std::vector<double> ampP, ampM;  // kappa^{+1/2}, kappa^{-1/2}
  std::vector<double> halfphi;     // phi(E)/2
  std::vector<double> xi2, xi4;    // E^2/2 - 3/8 and 19E/8 - E^3/2
};

struct Basis {
  double Ebar = 0.0, A = 0.0, C_A = 0.0;
  int n = 0;                    // table node count (alias of main.n)
  NodeSet main;                 // backs the Weber tables / numeric window
  NodeSet tail;                 // dense rule for all asymptotic node sums
  std::vector<float> val, der;  // Weber tables, node-major [j*kNpts + i]
  double reach = 0.0;           // certified s-reach of the tail sums
};

double grid_x(int i) { return -kL + kH * i; }

// Fill a node set from an n-point GH rule, dropping nodes outside the
// supported energy window. Returns {kept, dropped} Gaussian mass.
std::pair<double, double> fill_nodeset(NodeSet& ns, double Ebar, double A,
                                       double C_A, int n) {
  const double sA = std::sqrt(A);
  const auto rule = num::hermite_rule(n);
  double kept = 0.0, dropped = 0.0;
  for (int j = 0; j < n; ++j) {
    const double E = Ebar + rule.nodes[j] / sA;
    const double mass = rule.weights[j] * std::exp(-sq(rule.nodes[j]));
    if (E < kEmin || E > kEmax) {
      dropped += mass;
      continue;
    }
    kept += mass;
    ns.E.push_back(E);
    ns.w.push_back(rule.weights[j]);
    ns.c.push_back(C_A / sA * rule.weights[j] * weber::orthonormal_c0(E));
    const auto ec = weber::energy_constants(E);
    ns.ampP.push_back(std::sqrt(2.0 * ec.kappa));
    ns.ampM.push_back(std::sqrt(2.0 / ec.kappa));
    ns.halfphi.push_back(0.5 * ec.phi);
    ns.xi2.push_back(0.5 * E * E - 3.0 / 8.0);
    ns.xi4.push_back(19.0 * E / 8.0 - 0.5 * E * E * E);
    ++ns.n;
  }
  return {kept, dropped};
}

std::shared_ptr<const Basis> build_basis(double Ebar, double A, int n) {
  auto b = std::make_shared<Basis>();
  b->Ebar = Ebar;
  b->A = A;
  b->C_A = std::pow(2.0 * A / M_PI, 0.25);
  const double sA = std::sqrt(A);
  const auto [kept, dropped] = fill_nodeset(b->main, Ebar, A, b->C_A, n);
  b->n = b->main.n;
  // The GH rule must reproduce the continuum norm C_A^2 int e^{-2A d^2} dE = 1.
  const double enorm = sq(b->C_A) / sA * kept;
  if (std::abs(enorm - 1.0) > 1e-10) {
    if (dropped > 1e-11)
      throw OutOfSupportedRange(
          "iho: fiducial mass escapes the supported energy window [-6, 10]");
    throw NonConvergence("iho: Gauss-Hermite energy norm failed to converge");
  }
  fill_nodeset(b->tail, Ebar, A, b->C_A, kTailN);

  std::vector<double> xs(kNpts);
  for (int i = 0; i < kNpts; ++i) xs[i] = grid_x(i);
  b->val.resize(size_t(b->n) * kNpts);
  b->der.resize(size_t(b->n) * kNpts);
  for (int j = 0; j < b->n; ++j) {
    const auto sw = weber::weber_sweep(b->main.E[j], xs);
    for (int i = 0; i < kNpts; ++i) {
      b->val[size_t(j) * kNpts + i] = float(sw[i].value);
      b->der[size_t(j) * kNpts + i] = float(sw[i].derivative);
    }
  }
  b->reach = noise_floor_s(A);
  return b;
}

std::mutex g_cache_mutex;
std::map<std::pair<double, double>, std::shared_ptr<const Basis>> g_cache;

std::shared_ptr<const Basis> get_basis(double Ebar, double A, double s_needed) {
  if (s_needed > noise_floor_s(A) + 1e-9)
    throw NonConvergence(
        "iho: requested moment needs tail depth beyond the double-precision "
        "cancellation floor of the node sums");
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = g_cache.find({Ebar, A});
    if (it != g_cache.end()) return it->second;
  }
  auto b = build_basis(Ebar, A, n_interior(A));
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  if (g_cache.size() > 6) g_cache.erase(g_cache.begin());
  g_cache[{Ebar, A}] = b;
  return b;
}

// Hyperbolic classical flow of H = P^2 - Q^2/4: qdot = 2p, pdot = q/2.
// e^{-iTH} U(q,p) = e^{i(q'p' - qp)/2} U(q',p') e^{-iTH}.
void flow(double q, double p, double T, double& qe, double& pe, cplx& phase) {
  const double ch = std::cosh(T), sh = std::sinh(T);
  qe = q * ch + 2.0 * p * sh;
  pe = p * ch + 0.5 * q * sh;
  phase = std::polar(1.0, 0.5 * (qe * pe - q * p));
}

struct State {
  std::shared_ptr<const Basis> b;
  std::vector<cplx> d;          // table-node coefficients (already tau-evolved)
  std::vector<cplx> td;         // tail-node coefficients (same evolution)
  std::vector<cplx> val, der;   // collapsed tables sum_j d_j W_j
  double q = 0.0, p = 0.0;      // effective (flowed) label
  cplx phase{1.0, 0.0};         // accumulated global phase
};

State make_state(std::shared_ptr<const Basis> b, std::vector<cplx> d,
                 std::vector<cplx> td, double q, double p, cplx phase) {
  State st;
  st.b = std::move(b);
  st.d = std::move(d);
  st.td = std::move(td);
  st.q = q;
  st.p = p;
  st.phase = phase;
  st.val.assign(kNpts, cplx(0.0, 0.0));
  st.der.assign(kNpts, cplx(0.0, 0.0));
  const auto& bs = *st.b;
  for (int j = 0; j < bs.n; ++j) {
    const cplx dj = st.d[j];
    const float* v = &bs.val[size_t(j) * kNpts];
    const float* g = &bs.der[size_t(j) * kNpts];
    for (int i = 0; i < kNpts; ++i) {
      st.val[i] += dj * double(v[i]);
      st.der[i] += dj * double(g[i]);
    }
  }
  return st;
}

std::vector<cplx> evolved_coeffs(const NodeSet& ns, double T) {
  std::vector<cplx> d(ns.n);
  for (int j = 0; j < ns.n; ++j) d[j] = ns.c[j] * std::polar(1.0, -ns.E[j] * T);
  return d;
}

State coherent_state(double Ebar, double A, const PhaseLabel& label, double t,
                     double s_needed) {
  if (!(std::abs(label.q) <= kBoxQ && std::abs(label.p) <= kBoxP))
    throw OutOfSupportedRange("iho: |q| <= 8 and |p| <= 8 required");
  const double T = label.tau + t;
  if (!(std::abs(T) <= kBoxT))
    throw OutOfSupportedRange("iho: total evolution time |tau + t| <= 3");
  auto b = get_basis(Ebar, A, s_needed);
  double qe, pe;
  cplx phase;
  flow(label.q, label.p, T, qe, pe, phase);
  if (!(std::abs(qe) <= kBoxQ && std::abs(pe) <= kBoxP))
    throw OutOfSupportedRange("iho: evolved label left the supported box");
  return make_state(b, evolved_coeffs(b->main, T), evolved_coeffs(b->tail, T),
                    qe, pe, phase);
}

// ---- tail node sums -------------------------------------------------------

struct HPair {
  cplx H{0.0, 0.0};   // sum with d_j
  cplx Ht{0.0, 0.0};  // sum with conj(d_j)
};

HPair hsum(const NodeSet& ns, const std::vector<cplx>& d, int sigma, double s) {
  const double e2 = std::exp(-2.0 * s), e4 = e2 * e2;
  const double a15 = 1.0 - (15.0 / 16.0) * e4;
  const auto& amp = (sigma > 0) ? ns.ampP : ns.ampM;
  HPair r;
  for (int j = 0; j < ns.n; ++j) {
    const double z = 4.0 * ns.E[j] * e2;  // |z| < 0.02 beyond the split
    const double rho = 1.0 - 0.25 * z + (5.0 / 32.0) * z * z;
    const double ph =
        ns.E[j] * s + ns.halfphi[j] + ns.xi2[j] * e2 + ns.xi4[j] * e4;
    const cplx f = amp[j] * rho * a15 * std::polar(1.0, ph);
    r.H += d[j] * f;
    r.Ht += std::conj(d[j]) * f;
  }
  return r;
}

// Adaptive integration over [s0, s1] in unit panels; the tolerance tracks the
// running magnitude so large moments stay relatively resolved.
cplx panel_integrate(const num::Integrand& f, double s0, double s1,
                     double& err) {
  cplx acc(0.0, 0.0);
  double scale = 1.0;
  for (double a = s0; a < s1 - 1e-12; a += 1.0) {
    const double bnd = std::min(a + 1.0, s1);
    const auto r = num::integrate_adaptive(f, a, bnd, 1e-12 * scale, 1L << 13);
    acc += r.value;
    err += r.error_estimate;
    scale = std::max(scale, std::abs(acc));
  }
  return acc;
}

// Tail of int conj(Phi_a) Phi_b x^m dx over side*x > X, where Phi has label
// (q, p) applied as e^{ip(x-q)} S(x-q). Global phases excluded; the caller
// multiplies conj(a.phase) b.phase.
cplx tail_side(const State& a, double qa, double pa, const State& b, double qb,
               double pb, int m, int side, double X, double sT, double& err) {
  const NodeSet& bs = a.b->tail;
  const bool shared_arg = (&a == &b) && qa == qb;
  const double sgn_m = (m % 2 && side < 0) ? -1.0 : 1.0;
  const int sigma = side;

  auto slow = [&](double s) -> cplx {
    const double u = std::exp(s);
    const double x = side * u;
    const double Ya = std::abs(x - qa), Yb = std::abs(x - qb);
    const double sa = std::log(Ya), sb = std::log(Yb);
    const HPair Pa = hsum(bs, a.td, sigma, sa);
    const HPair Pb = shared_arg ? Pa : hsum(bs, b.td, sigma, sb);
    const double dTheta = 0.25 * (Yb * Yb - Ya * Ya);
    const double extph = pb * (x - qb) - pa * (x - qa);
    const double weight = sgn_m * std::pow(u, m) * u / std::sqrt(Ya * Yb);
    const cplx T1 = std::conj(Pa.H) * Pb.H * std::polar(1.0, dTheta + extph);
    const cplx T2 =
        Pa.Ht * std::conj(Pb.Ht) * std::polar(1.0, -dTheta + extph);
    return 0.25 * weight * (T1 + T2);
  };

  // Label mismatch dephases the tail at rate (dq/2 -+ dp) e^s; cap the
  // numerically resolved range and bound the remainder by parts.
  const double rate = 0.5 * std::abs(qa - qb) + std::abs(pa - pb);
  const double s0 = std::log(X);
  double s_hi = sT;
  if (rate > 0.0) {
    const double s_cap = std::log(3000.0 / rate);
    if (s_cap < s_hi) {
      s_hi = std::max(s0, s_cap);
      const HPair Pa = hsum(bs, a.td, sigma, s_hi);
      const HPair Pb = hsum(bs, b.td, sigma, s_hi);
      const double env = 0.25 * std::pow(std::exp(s_hi), m) *
                         (std::abs(Pa.H) * std::abs(Pb.H) +
                          std::abs(Pa.Ht) * std::abs(Pb.Ht));
      err += 3.0 * env / (rate * std::exp(s_hi));
    }
  }
  cplx acc = (s_hi > s0) ? panel_integrate(slow, s0, s_hi, err)
                         : cplx(0.0, 0.0);

  // Endpoint correction for the fast e^{+-i(Theta_a + Theta_b)} terms:
  // int_X^inf A e^{i phi} dx ~ i A(X) e^{i phi(X)} / phi'(X).
  const double Ua = (side > 0) ? X - qa : X + qa;
  const double Ub = (side > 0) ? X - qb : X + qb;
  const HPair Pa0 = hsum(bs, a.td, sigma, std::log(Ua));
  const HPair Pb0 =
      shared_arg && Ua == Ub ? Pa0 : hsum(bs, b.td, sigma, std::log(Ub));
  const double theta_sum = 0.25 * (Ua * Ua + Ub * Ub) + 0.5 * M_PI;
  const double extph0 = (side > 0) ? pb * Ub - pa * Ua : -pb * Ub + pa * Ua;
  const double dpd = (side > 0) ? pb - pa : pa - pb;
  const cplx A1 = Pa0.Ht * Pb0.H;
  const cplx A2 = std::conj(Pa0.H) * std::conj(Pb0.Ht);
  const double pre = 0.25 * sgn_m * std::pow(X, m) / std::sqrt(Ua * Ub);
  const double fsgn = (side > 0) ? 1.0 : -1.0;  // sin-side fast terms flip
  const cplx cross =
      cplx(0.0, 1.0) * pre *
      (fsgn * A1 * std::polar(1.0, theta_sum + extph0) /
           (0.5 * (Ua + Ub) + dpd) +
       fsgn * A2 * std::polar(1.0, -theta_sum + extph0) /
           (-0.5 * (Ua + Ub) + dpd));
  err += std::abs(pre) * (std::abs(A1) + std::abs(A2)) * (4.0 + m) / (X * X);
  err += 1e-6 * std::abs(acc);  // WKB truncation of the tail model
  return acc + cross;
}

// ---- numeric window -------------------------------------------------------

// Composite Simpson over the shared table grid.
template <class G>
cplx simpson_grid(const G& g) {
  cplx s = g(0) + g(kNpts - 1);
  for (int i = 1; i < kNpts - 1; ++i) s += ((i % 2) ? 4.0 : 2.0) * g(i);
  return s * (kH / 3.0);
}

cplx interp_val(const State& st, double y) {
  const double t = (y + kL) / kH;
  int i = int(std::floor(t));
  i = std::max(0, std::min(kNpts - 2, i));
  const double f = t - i;
  const double h00 = (1.0 + 2.0 * f) * sq(1.0 - f);
  const double h10 = f * sq(1.0 - f);
  const double h01 = f * f * (3.0 - 2.0 * f);
  const double h11 = f * f * (f - 1.0);
  return h00 * st.val[i] + kH * h10 * st.der[i] + h01 * st.val[i + 1] +
         kH * h11 * st.der[i + 1];
}

// <a|b> with weight x^m, excluding the global phases.
cplx bilinear(const State& a, const State& b, int m, double sT, double& err) {
  if (a.q == b.q && a.p == b.p) {
    // Equal labels cancel pointwise, so work in the common displaced frame
    // with the label stripped; only the undisplaced frame supports m > 0.
    if (m > 0 && a.q != 0.0)
      throw InvalidArgument("iho: moments of displaced states not supported");
    const cplx numeric = simpson_grid([&](int i) -> cplx {
      cplx g = std::conj(a.val[i]) * b.val[i];
      for (int k = 0; k < m; ++k) g *= grid_x(i);
      return g;
    });
    const cplx tp = tail_side(a, 0.0, 0.0, b, 0.0, 0.0, m, +1, kL, sT, err);
    const cplx tm = tail_side(a, 0.0, 0.0, b, 0.0, 0.0, m, -1, kL, sT, err);
    return numeric + tp + tm;
  }
  const double X = kXsplit;
  const int nx = int(2.0 * kXsplit / kH) + 1;  // odd
  cplx s(0.0, 0.0);
  for (int i = 0; i < nx; ++i) {
    const double x = -kXsplit + kH * i;
    const cplx fa = std::polar(1.0, a.p * (x - a.q)) * interp_val(a, x - a.q);
    const cplx fb = std::polar(1.0, b.p * (x - b.q)) * interp_val(b, x - b.q);
    cplx g = std::conj(fa) * fb;
    for (int k = 0; k < m; ++k) g *= x;
    const double c = (i == 0 || i == nx - 1) ? 1.0 : ((i % 2) ? 4.0 : 2.0);
    s += c * g;
  }
  cplx numeric = s * (kH / 3.0);
  err += 2e-6 * std::abs(numeric);  // interpolated-integrand Simpson floor
  const cplx tp = tail_side(a, a.q, a.p, b, b.q, b.p, m, +1, X, sT, err);
  const cplx tm = tail_side(a, a.q, a.p, b, b.q, b.p, m, -1, X, sT, err);
  return numeric + tp + tm;
}

// Im int conj(S) S' dy for an undisplaced state: Simpson over the window plus
// the slow tails 1/8 e^s (|H|^2 - |Ht|^2) and the subleading
// 1/4 e^{-s} Re[conj(H) H_E - Ht conj(Ht_E)] per side.
double flux_P1(const State& st, double sT, double& err) {
  const NodeSet& ts = st.b->tail;
  const cplx numeric = simpson_grid(
      [&](int i) -> cplx { return std::conj(st.val[i]) * st.der[i]; });
  std::vector<cplx> dE(ts.n);
  for (int j = 0; j < ts.n; ++j) dE[j] = ts.E[j] * st.td[j];
  double tails = 0.0;
  for (int side : {+1, -1}) {
    auto f = [&](double s) -> cplx {
      const HPair P = hsum(ts, st.td, side, s);
      const HPair PE = hsum(ts, dE, side, s);
      const double lead =
          0.125 * std::exp(s) * (std::norm(P.H) - std::norm(P.Ht));
      const double sub =
          0.25 * std::exp(-s) *
          (std::real(std::conj(P.H) * PE.H) -
           std::real(P.Ht * std::conj(PE.Ht)));
      return cplx(lead + sub, 0.0);
    };
    const double part = std::real(panel_integrate(f, std::log(kL), sT, err));
    tails += (side > 0) ? part : -part;
  }
  return numeric.imag() + tails;
}

// <S|H|S> = Re int conj(S) S_E dy, using W_j'' = -(y^2/4 + E_j) W_j to cancel
// the kinetic and potential pieces pointwise (S_E carries coefficients E_j d_j).
double energy_mean(const State& st, double sT, double& err) {
  const Basis& bs = *st.b;
  std::vector<cplx> dE(bs.main.n), tdE(bs.tail.n);
  for (int j = 0; j < bs.main.n; ++j) dE[j] = bs.main.E[j] * st.d[j];
  for (int j = 0; j < bs.tail.n; ++j) tdE[j] = bs.tail.E[j] * st.td[j];
  const State stE =
      make_state(st.b, dE, tdE, st.q, st.p, cplx(1.0, 0.0));
  return std::real(bilinear(st, stE, 0, sT, err));
}

}  // namespace

IhoFiducialParams make_iho_params(double Ebar, double A) {
  if (!std::isfinite(Ebar) || !std::isfinite(A))
    throw InvalidArgument("iho: parameters must be finite");
  if (!(Ebar >= -2.0 && Ebar <= 6.0))
    throw OutOfSupportedRange("iho: Ebar outside [-2, 6]");
  if (!(A >= 1.0 && A <= 100.0))
    throw OutOfSupportedRange("iho: A outside [1, 100]");
  return {Ebar, A, std::pow(2.0 * A / M_PI, 0.25)};
}

static StateEvaluator make_evaluator(std::shared_ptr<State> st) {
  auto far = [st](double y, bool want_der) -> cplx {
    const int side = (y >= 0.0) ? +1 : -1;
    const double ay = std::abs(y);
    cplx s(0.0, 0.0);
    const NodeSet& ts = st->b->tail;
    for (int j = 0; j < ts.n; ++j) {
      const auto vd = weber::asymptotic_W(ts.E[j], ay, side);
      s += st->td[j] * (want_der ? double(side) * vd.derivative : vd.value);
    }
    return s;
  };
  StateEvaluator ev;
  ev.amplitude = [st, far](double x) -> cplx {
    const double y = x - st->q;
    const cplx ph = st->phase * std::polar(1.0, st->p * y);
    const cplx v =
        (std::abs(y) <= kL - kH) ? interp_val(*st, y) : far(y, false);
    return ph * v;
  };
  ev.derivative = [st, far](double x) -> cplx {
    const double y = x - st->q;
    const cplx ph = st->phase * std::polar(1.0, st->p * y);
    cplx v, g;
    if (std::abs(y) <= kL - kH) {
      // value and slope of the same cubic Hermite patch
      v = interp_val(*st, y);
      const double t = (y + kL) / kH;
      int i = std::max(0, std::min(kNpts - 2, int(std::floor(t))));
      const double f = t - i;
      g = ((6.0 * f * f - 6.0 * f) * (st->val[i] - st->val[i + 1]) / kH +
           (3.0 * f * f - 4.0 * f + 1.0) * st->der[i] +
           (3.0 * f * f - 2.0 * f) * st->der[i + 1]);
    } else {
      v = far(y, false);
      g = far(y, true);
    }
    return ph * (cplx(0.0, st->p) * v + g);
  };
  ev.hints = {st->q};
  return ev;
}

StateEvaluator iho_fiducial(double Ebar, double A, C0Placement c0) {
  const auto prm = make_iho_params(Ebar, A);
  auto b = get_basis(Ebar, A, s_required(0, A, 0.0));
  std::vector<cplx> d(b->main.n), td(b->tail.n);
  if (c0 == C0Placement::inside) {
    for (int j = 0; j < b->main.n; ++j) d[j] = b->main.c[j];
    for (int j = 0; j < b->tail.n; ++j) td[j] = b->tail.c[j];
  } else {
    // the constant evaluated once at Ebar and pulled out of the E-integral
    const double c0bar = weber::energy_constants(Ebar).C0;
    const double sA = std::sqrt(A);
    for (int j = 0; j < b->main.n; ++j)
      d[j] = prm.C_A / sA * b->main.w[j] * c0bar;
    for (int j = 0; j < b->tail.n; ++j)
      td[j] = prm.C_A / sA * b->tail.w[j] * c0bar;
  }
  auto st = std::make_shared<State>(make_state(b, std::move(d), std::move(td),
                                               0.0, 0.0, cplx(1.0, 0.0)));
  return make_evaluator(st);
}

StateEvaluator iho_coherent(double Ebar, double A, const PhaseLabel& label) {
  make_iho_params(Ebar, A);
  auto st = std::make_shared<State>(
      coherent_state(Ebar, A, label, 0.0, s_required(0, A, label.tau)));
  return make_evaluator(st);
}

cplx iho_overlap(double Ebar, double A, const PhaseLabel& la, double ta,
                 const PhaseLabel& lb, double tb, double* est_error) {
  make_iho_params(Ebar, A);
  const double sT =
      s_required(0, A, std::max(std::abs(la.tau + ta), std::abs(lb.tau + tb)));
  const State a = coherent_state(Ebar, A, la, ta, sT);
  const State b = coherent_state(Ebar, A, lb, tb, sT);
  double err = 0.0;
  const cplx o = std::conj(a.phase) * b.phase * bilinear(a, b, 0, sT, err);
  if (est_error) *est_error = err;
  return o;
}

double iho_norm(double Ebar, double A, const PhaseLabel& label) {
  make_iho_params(Ebar, A);
  const double sT = s_required(0, A, label.tau);
  const State st = coherent_state(Ebar, A, label, 0.0, sT);
  double err = 0.0;
  return std::real(bilinear(st, st, 0, sT, err));
}

double iho_energy_x(double Ebar, double A, const PhaseLabel& label) {
  make_iho_params(Ebar, A);
  const double sT = s_required(1, A, label.tau);
  State st = coherent_state(Ebar, A, label, 0.0, sT);
  // strip the label: the primitives act on the evolved fiducial S itself
  const double qe = st.q, pe = st.p;
  st.q = 0.0;
  st.p = 0.0;
  double err = 0.0;
  const double Em = energy_mean(st, s_required(0, A, label.tau), err);
  double errq = 0.0, errp = 0.0;
  const double Q1 = std::real(bilinear(st, st, 1, sT, errq));
  const double P1 = flux_P1(st, sT, errp);
  return Em + pe * pe - 0.25 * qe * qe + 2.0 * pe * P1 - 0.5 * qe * Q1;
}

double iho_moment_Q(double Ebar, double A, int order) {
  make_iho_params(Ebar, A);
  if (order != 1 && order != 2)
    throw InvalidArgument("iho_moment_Q: order must be 1 or 2");
  const double sT = s_required(order, A, 0.0);
  const State st = coherent_state(Ebar, A, {0.0, 0.0, 0.0}, 0.0, sT);
  double err = 0.0;
  return std::real(bilinear(st, st, order, sT, err));
}

double iho_moment_P1(double Ebar, double A) {
  make_iho_params(Ebar, A);
  const double sT = s_required(1, A, 0.0);
  const State st = coherent_state(Ebar, A, {0.0, 0.0, 0.0}, 0.0, sT);
  double err = 0.0;
  return flux_P1(st, sT, err);
}

double iho_moment_Q1_continuum(double Ebar, double A) {
  const auto prm = make_iho_params(Ebar, A);
  const double sT = s_required(1, A, 0.0);
  if (sT > noise_floor_s(A) + 1e-9)
    throw NonConvergence("iho: continuum tail depth beyond the noise floor");
  const State st = coherent_state(Ebar, A, {0.0, 0.0, 0.0}, 0.0, sT);
  const cplx numeric = simpson_grid([&](int i) -> cplx {
    return grid_x(i) * std::conj(st.val[i]) * st.val[i];
  });

  // Independent tail: the node sums are replaced by adaptive E-integrals of
  // the same asymptotic density (the fiducial is real, so Ht = H).
  auto hc = [&](int sigma, double s) -> cplx {
    const double e2 = std::exp(-2.0 * s), e4 = e2 * e2;
    const double a15 = 1.0 - (15.0 / 16.0) * e4;
    auto g = [&](double E) -> cplx {
      const auto ec = weber::energy_constants(E);
      const double amp = std::pow(ec.kappa, 0.5 * sigma);
      const double z = 4.0 * E * e2;
      const double rho = 1.0 - 0.25 * z + (5.0 / 32.0) * z * z;
      const double ph = E * s + 0.5 * ec.phi + (0.5 * E * E - 3.0 / 8.0) * e2 +
                        (19.0 * E / 8.0 - 0.5 * E * E * E) * e4;
      return prm.C_A * weber::orthonormal_c0(E) * std::sqrt(2.0) * amp * rho *
             a15 * std::polar(1.0, ph);
    };
    return num::integrate_gaussian_weight(g, Ebar, A, 1e-11).value;
  };
  double err = 0.0;
  double tails = 0.0;
  const double s0 = std::log(kL);
  const double theta2 = 2.0 * (0.25 * kL * kL + 0.25 * M_PI);
  for (int side : {+1, -1}) {
    const double sgn_m = (side < 0) ? -1.0 : 1.0;  // m = 1 weight sign
    auto f = [&](double s) -> cplx {
      const cplx H = hc(side, s);
      return cplx(sgn_m * 0.5 * std::exp(s) * std::norm(H), 0.0);
    };
    tails += std::real(panel_integrate(f, s0, sT, err));
    // endpoint correction of the fast terms, as in tail_side with m = 1
    const cplx H0 = hc(side, s0);
    const double fsgn = (side > 0) ? 1.0 : -1.0;
    const cplx cross = cplx(0.0, 1.0) * 0.25 * sgn_m * fsgn *
                       (H0 * H0 * std::polar(1.0, theta2) / kL -
                        std::conj(H0 * H0) * std::polar(1.0, -theta2) / kL);
    tails += std::real(cross);
  }
  return std::real(numeric) + tails;
}

std::pair<double, double> stability_remainder(double Ebar, double A,
                                              double t) {
  const auto prm = make_iho_params(Ebar, A);
  const double closed = t * t / (4.0 * A);
  // the same object as C_A^2 t^2 int e^{-2A d^2} d^2 dd, by GH quadrature
  const auto rule = num::hermite_rule(48);
  double s = 0.0;
  for (size_t j = 0; j < rule.nodes.size(); ++j)
    s += rule.weights[j] * sq(rule.nodes[j]);
  const double quad = sq(prm.C_A) * t * t * std::pow(2.0 * A, -1.5) * s;
  return {closed, quad};
}

double stability_deviation_x(double Ebar, double A, double t) {
  const cplx o =
      iho_overlap(Ebar, A, {0.0, 0.0, 0.0}, 0.0, {0.0, 0.0, 0.0}, t);
  return 2.0 - 2.0 * std::abs(o);
}

ActionSystem action_system_solve(double Ebar, double A, double J_A,
                                 double omega_A) {
  make_iho_params(Ebar, A);
  if (!(omega_A > 0.0 && omega_A < M_PI) || std::abs(std::sin(omega_A)) < 0.05)
    throw InvalidArgument("iho: omega_A must lie in (0, pi) away from 0, pi");

  const double sT = s_required(1, A, 0.0);
  const State st = coherent_state(Ebar, A, {0.0, 0.0, 0.0}, 0.0, sT);
  double err = 0.0;
  ActionSystem sys;
  sys.J_A = J_A;
  sys.omega_A = omega_A;
  sys.K1 = flux_P1(st, sT, err);
  sys.K2 = std::real(bilinear(st, st, 1, sT, err));

  // <H> = omega J with q = p cot(omega):
  // (1 - cot^2/4) p^2 + (2 K1 - K2 cot/2) p + (Ebar - omega J) = 0.
  const double cot = std::cos(omega_A) / std::sin(omega_A);
  const double a2 = 1.0 - 0.25 * cot * cot;
  const double a1 = 2.0 * sys.K1 - 0.5 * cot * sys.K2;
  const double a0 = Ebar - omega_A * J_A;
  double p0;
  if (std::abs(a2) < 1e-12) {
    if (std::abs(a1) < 1e-12)
      throw NonConvergence("iho: degenerate action system");
    p0 = -a0 / a1;
  } else {
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc < 0.0)
      throw NonConvergence(
          "iho: no real label solves the action identity at this (J, omega)");
    const double r1 = (-a1 + std::sqrt(disc)) / (2.0 * a2);
    const double r2 = (-a1 - std::sqrt(disc)) / (2.0 * a2);
    // prefer the branch continuously connected to p = 0+ at the ground action
    if (r1 >= 0.0 && r2 >= 0.0)
      p0 = std::min(r1, r2);
    else if (r1 >= 0.0)
      p0 = r1;
    else if (r2 >= 0.0)
      p0 = r2;
    else
      p0 = (std::abs(r1) < std::abs(r2)) ? r1 : r2;
  }
  double q0 = p0 * cot;

  const double K1 = sys.K1, K2 = sys.K2;
  auto resid = [&](const std::vector<double>& x) -> std::vector<double> {
    const double q = x[0], p = x[1];
    return {Ebar + 2.0 * p * K1 - 0.5 * q * K2 + p * p - 0.25 * q * q -
                omega_A * J_A,
            p * std::cos(omega_A) - q * std::sin(omega_A)};
  };
  const auto sol = num::solve_root(resid, {q0, p0}, 1e-13);
  if (!(std::abs(sol[0]) <= kBoxQ && std::abs(sol[1]) <= kBoxP))
    throw OutOfSupportedRange("iho: action solution left the label box");
  sys.solution = {sol[0], sol[1], 0.0};
  const auto r = resid(sol);
  sys.residual1 = r[0];
  sys.residual2 = r[1];
  return sys;
}

}  // namespace ccs::iho
