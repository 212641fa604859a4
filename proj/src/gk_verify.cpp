// Axiom harness implementation. The smeared identity-resolution check is
// the only heavy piece: the phase-plane integral int <f|q,p><q,p|g>
// dq dp / (2 pi hbar) is taken over three doubling truncation boxes with
// the annuli integrated incrementally. Per family the overlap <f|q,p> is
//   gaussian: closed complex-Gaussian form,
//   window:   a stable erf-segment form in k (Faddeeva based),
//   iho:      Simpson against the tabulated fiducial; the p-strip integral
//             is done exactly through the sample cross-correlation (FFT)
//             against the kernel int_a^b e^{ip dy} dp, so only the q
//             integration is adaptive.
// The window defect decays like 1/R (sharp spectral edges), the iho defect
// like the log-normal tail mass of the fiducial beyond s = ln R, so the
// window rungs sit in the thousands and the iho check is only feasible at
// small A.

#include "gk_verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <memory>

#include "errors.hpp"
#include "json.hpp"

namespace ccs::gk {

using freepart::Family;
using freepart::FiducialParams;
using hilbert::PhysicalParams;
using num::cplx;

namespace {

constexpr unsigned long long kSeed = 9173;

const char* family_name(FamilyId id) {
  switch (id) {
    case FamilyId::free_window: return "free-window";
    case FamilyId::free_gaussian: return "free-gaussian";
    case FamilyId::free_bump: return "free-bump";
    case FamilyId::iho: return "iho";
  }
  return "?";
}

bool is_free(FamilyId id) { return id != FamilyId::iho; }

FiducialParams to_fp(const FamilySpec& fs) {
  FiducialParams fp;
  switch (fs.id) {
    case FamilyId::free_window: fp.family = Family::window; break;
    case FamilyId::free_gaussian: fp.family = Family::gaussian; break;
    case FamilyId::free_bump: fp.family = Family::bump; break;
    case FamilyId::iho: throw InvalidArgument("gk: iho has no free params");
  }
  fp.k0 = fs.k0;
  fp.k1 = fs.k1;
  fp.kbar = fs.kbar;
  fp.A = fs.A;
  return fp;
}

nlohmann::ordered_json params_json(const FamilySpec& fs) {
  nlohmann::ordered_json j;
  j["family"] = family_name(fs.id);
  if (fs.id == FamilyId::iho) {
    j["Ebar"] = fs.Ebar;
    j["A"] = fs.A;
  } else if (fs.id == FamilyId::free_gaussian) {
    j["kbar"] = fs.kbar;
    j["A"] = fs.A;
  } else {
    j["k0"] = fs.k0;
    j["k1"] = fs.k1;
  }
  if (is_free(fs.id)) {
    j["hbar"] = fs.phys.hbar;
    j["mass"] = fs.phys.mass;
  }
  return j;
}

AxiomReport base_report(const char* axiom, const FamilySpec& fs) {
  AxiomReport r;
  r.axiom = axiom;
  r.family = family_name(fs.id);
  r.params = params_json(fs).dump();
  return r;
}

void finish(AxiomReport& r) {
  r.pass = std::abs(r.measured - r.predicted) <= r.tolerance;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- low-discrepancy labels (2D Kronecker / R2 sequence) -------------------

std::vector<PhaseLabel> sample_labels(int n, double box,
                                      unsigned long long seed) {
  const double a1 = 0.7548776662466927, a2 = 0.5698402909980532;
  std::vector<PhaseLabel> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = double(seed + i);
    const double u1 = std::fmod(0.5 + t * a1, 1.0);
    const double u2 = std::fmod(0.5 + t * a2, 1.0);
    out.push_back({box * (2.0 * u1 - 1.0), box * (2.0 * u2 - 1.0), 0.0});
  }
  return out;
}

// ---- Gaussian closed forms -------------------------------------------------

double test_norm_const(const TestState& t) {
  if (t.hermite == 0) return std::pow(2.0 * M_PI * t.width * t.width, -0.25);
  return std::pow(2.0 * M_PI, -0.25) * std::pow(t.width, -1.5);
}

void validate_test(const TestState& t) {
  if (!(t.width > 0.0)) throw InvalidArgument("gk: test-state width <= 0");
  if (t.hermite != 0 && t.hermite != 1)
    throw InvalidArgument("gk: test-state hermite must be 0 or 1");
}

struct GaussQuad {
  cplx a, b, c;  // exponent -a x^2 + b x + c, Re a > 0
};

cplx gmom(const GaussQuad& g, int n) {
  const cplx m0 =
      std::sqrt(M_PI / g.a) * std::exp(g.b * g.b / (4.0 * g.a) + g.c);
  if (n == 0) return m0;
  const cplx r = g.b / (2.0 * g.a);
  if (n == 1) return r * m0;
  return (0.5 / g.a + r * r) * m0;
}

// int (x-c1)^{h1} (x-c2)^{h2} e^{-a x^2 + b x + c} dx, h in {0,1}
cplx gmom_shifted(const GaussQuad& g, double c1, int h1, double c2, int h2) {
  if (h1 == 0 && h2 == 0) return gmom(g, 0);
  if (h1 == 1 && h2 == 1)
    return gmom(g, 2) - (c1 + c2) * gmom(g, 1) + c1 * c2 * gmom(g, 0);
  const double c = h1 ? c1 : c2;
  return gmom(g, 1) - c * gmom(g, 0);
}

// <f|g> for two test states (real result).
double test_inner(const TestState& f, const TestState& g) {
  const double wf2 = f.width * f.width, wg2 = g.width * g.width;
  GaussQuad q;
  q.a = 0.25 / wf2 + 0.25 / wg2;
  q.b = 0.5 * f.center / wf2 + 0.5 * g.center / wg2;
  q.c = -0.25 * f.center * f.center / wf2 - 0.25 * g.center * g.center / wg2;
  const cplx v = gmom_shifted(q, f.center, f.hermite, g.center, g.hermite);
  return test_norm_const(f) * test_norm_const(g) * v.real();
}

// <f | q,p> for the free Gaussian family: both factors are Gaussians.
cplx overlap_gaussian_family(const TestState& f, double q, double p,
                             double kbar, double A, double hbar) {
  const double kap = p / hbar + kbar;
  const double w2 = f.width * f.width;
  GaussQuad g;
  g.a = 0.25 / w2 + 0.25 / A;
  g.b = cplx(0.5 * f.center / w2 + 0.5 * q / A, kap);
  g.c = cplx(-0.25 * f.center * f.center / w2 - 0.25 * q * q / A, -kap * q);
  const double pref =
      test_norm_const(f) * std::pow(2.0 * A / M_PI, 0.25) / std::sqrt(2.0 * A);
  return pref * gmom_shifted(g, f.center, f.hermite, 0.0, 0);
}

// int_a^b e^{-t^2 + 2 i z t} dt for real z; stable for all a, b (the naive
// erf difference overflows like e^{z^2} at large |z|).
cplx gauss_seg(double a, double b, double z) {
  if (a > b) return -gauss_seg(b, a, z);
  if (a < 0.0) {
    if (b <= 0.0) return std::conj(gauss_seg(-b, -a, z));
    return std::conj(gauss_seg(0.0, -a, z)) + gauss_seg(0.0, b, z);
  }
  auto upper = [z](double t) -> cplx {  // int_t^inf, t >= 0
    return 0.5 * std::sqrt(M_PI) * std::exp(cplx(-t * t, 2.0 * z * t)) *
           num::faddeeva(cplx(z, t));
  };
  return upper(a) - upper(b);
}

// <f | q,p> for the window family, in k-space over the shifted window.
cplx overlap_window_family(const TestState& f, double q, double p, double k0,
                           double k1, double hbar) {
  const double s = p / hbar, w = f.width;
  const double C = 1.0 / std::sqrt(k1 - k0);
  const double Nk = std::pow(2.0 * w * w / M_PI, 0.25);
  const double z = 0.5 * (f.center - q) / w;
  return (C * Nk / w) * gauss_seg(w * (k0 + s), w * (k1 + s), z);
}

// ---- small radix-2 FFT (cross-correlation of the iho sample vectors) -------

void fft_inplace(std::vector<cplx>& a, bool inverse) {
  const size_t n = a.size();
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * M_PI / double(len) * (inverse ? 1.0 : -1.0);
    const cplx wl = std::polar(1.0, ang);
    for (size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const cplx u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

// ---- phase-plane boxes -----------------------------------------------------

struct PlaneProblem {
  // int_{pa}^{pb} <f|q,p><q,p|g> dp / (2 pi hbar) at fixed q
  std::function<cplx(double q, double pa, double pb)> strip;
  // p-support to intersect with the requested box (cost control only)
  std::function<std::pair<double, double>(double)> pclip =
      [](double) { return std::pair<double, double>(-1e300, 1e300); };
  double tol_out = 1e-8;
  long out_budget = 1L << 21;
};

// wraps a pointwise integrand into an adaptive p-strip
std::function<cplx(double, double, double)> adaptive_strip(
    std::function<cplx(double, double)> h, double tol_in) {
  return [h = std::move(h), tol_in](double q, double pa, double pb) -> cplx {
    auto f = [&h, q](double p) { return h(q, p); };
    return num::integrate_adaptive(f, pa, pb, tol_in).value;
  };
}

cplx plane_box(const PlaneProblem& pp, double qa, double qb, double pa,
               double pb, bool* converged) {
  auto outer = [&](double q) -> cplx {
    const auto [lo0, hi0] = pp.pclip(q);
    const double lo = std::max(pa, lo0), hi = std::min(pb, hi0);
    if (!(lo < hi)) return cplx(0.0, 0.0);
    return pp.strip(q, lo, hi);
  };
  const auto r =
      num::integrate_adaptive(outer, qa, qb, pp.tol_out, pp.out_budget);
  if (!r.converged) *converged = false;
  return r.value;
}

struct RungResult {
  double rung[3];
  double defect[3];
  cplx value;  // truncated integral at the largest rung
};

RungResult rung_integrate(const PlaneProblem& pp, const double R[3],
                          double ref) {
  RungResult out{};
  bool ok = true;
  cplx I = plane_box(pp, -R[0], R[0], -R[0], R[0], &ok);
  out.rung[0] = R[0];
  out.defect[0] = std::abs(I - ref);
  for (int i = 1; i < 3; ++i) {
    const double r0 = R[i - 1], r1 = R[i];
    I += plane_box(pp, -r1, -r0, -r1, r1, &ok);  // left q-annulus
    I += plane_box(pp, r0, r1, -r1, r1, &ok);    // right q-annulus
    I += plane_box(pp, -r0, r0, r0, r1, &ok);    // top p-annulus
    I += plane_box(pp, -r0, r0, -r1, -r0, &ok);  // bottom p-annulus
    out.rung[i] = r1;
    out.defect[i] = std::abs(I - ref);
  }
  if (!ok)
    throw NonConvergence(
        fmt("identity resolution: phase-plane quadrature stalled at radii "
            "{%g, %g, %g}",
            R[0], R[1], R[2]));
  out.value = I;
  return out;
}

// iho: Simpson samples of conj(f) Psi(.-q) and conj(g) Psi(.-q) on a shared
// grid; the p-strip is Sum_{j,k} uf_j ug_k E(y_j - y_k) with
// E(dy) = int_a^b e^{ip dy} dp, evaluated through the FFT cross-correlation.
struct IhoPlane {
  std::vector<double> xs, fw, gw;  // grid; Simpson-weighted conj(f), conj(g)
  hilbert::StateEvaluator fid;
  double h = 0.0;
  bool same = false;  // f == g
  // per-q cache
  double q_cached = std::nan("");
  std::vector<cplx> Xd;  // cross-correlation, circular layout, size nfft
  size_t nfft = 0, npts = 0;
};

std::shared_ptr<IhoPlane> make_iho_plane(double Ebar, double A,
                                         const TestState& f,
                                         const TestState& g) {
  if (f.hermite != 0 || g.hermite != 0)
    throw InvalidArgument("gk: iho identity supports hermite = 0 only");
  auto pl = std::make_shared<IhoPlane>();
  pl->fid = iho::iho_fiducial(Ebar, A);
  const double lo =
      std::min(f.center - 8.0 * f.width, g.center - 8.0 * g.width);
  const double hi =
      std::max(f.center + 8.0 * f.width, g.center + 8.0 * g.width);
  const double htarget = 0.002;
  long n = lround(std::ceil((hi - lo) / htarget));
  if (n % 2) ++n;
  pl->h = (hi - lo) / double(n);
  pl->same = f.center == g.center && f.width == g.width;
  const double Nf = test_norm_const(f), Ng = test_norm_const(g);
  for (long j = 0; j <= n; ++j) {
    const double x = lo + pl->h * double(j);
    const double sw = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    const double wgt = sw * pl->h / 3.0;
    const double df = (x - f.center) / (2.0 * f.width);
    const double dg = (x - g.center) / (2.0 * g.width);
    pl->xs.push_back(x);
    pl->fw.push_back(wgt * Nf * std::exp(-df * df));
    if (!pl->same) pl->gw.push_back(wgt * Ng * std::exp(-dg * dg));
  }
  pl->npts = pl->xs.size();
  size_t nf = 1;
  while (nf < 2 * pl->npts) nf <<= 1;
  pl->nfft = nf;
  return pl;
}

void iho_correlate(IhoPlane& pl, double q) {
  if (pl.q_cached == q) return;
  const size_t m = pl.npts, nf = pl.nfft;
  std::vector<double> psi(m);
  for (size_t j = 0; j < m; ++j)
    psi[j] = pl.fid.amplitude(pl.xs[j] - q).real();
  std::vector<cplx> A(nf, cplx(0.0, 0.0));
  std::vector<cplx> B;
  for (size_t j = 0; j < m; ++j) A[j] = cplx(pl.fw[j] * psi[j], 0.0);
  if (!pl.same) {
    B.assign(nf, cplx(0.0, 0.0));
    for (size_t j = 0; j < m; ++j) B[j] = cplx(pl.gw[j] * psi[j], 0.0);
  }
  fft_inplace(A, false);
  if (pl.same) {
    for (auto& x : A) x = cplx(std::norm(x), 0.0);
  } else {
    fft_inplace(B, false);
    for (size_t j = 0; j < nf; ++j) A[j] *= std::conj(B[j]);
  }
  fft_inplace(A, true);
  pl.Xd = std::move(A);  // Xd[d] = Sum_k uf_{k+d} ug_k (d<0 wraps to nf+d)
  pl.q_cached = q;
}

PlaneProblem iho_plane_problem(const std::shared_ptr<IhoPlane>& pl) {
  PlaneProblem pp;
  pp.tol_out = 3e-7;
  pp.strip = [pl](double q, double pa, double pb) -> cplx {
    iho_correlate(*pl, q);
    const size_t m = pl->npts, nf = pl->nfft;
    const double h = pl->h;
    // E(d h) = (e^{i pb d h} - e^{i pa d h}) / (i d h); E(0) = pb - pa
    cplx acc = pl->Xd[0] * (pb - pa);
    const cplx sb = std::polar(1.0, pb * h), sa = std::polar(1.0, pa * h);
    cplx eb = sb, ea = sa;
    for (size_t d = 1; d < m; ++d) {
      const cplx E = (eb - ea) / cplx(0.0, double(d) * h);
      acc += pl->Xd[d] * E + pl->Xd[nf - d] * std::conj(E);
      eb *= sb;
      ea *= sa;
    }
    return acc / (2.0 * M_PI);
  };
  return pp;
}

}  // namespace

std::string AxiomReport::to_json() const {
  nlohmann::ordered_json j;
  j["axiom"] = axiom;
  j["family"] = family;
  j["params"] = nlohmann::ordered_json::parse(params);
  j["measured"] = measured;
  j["predicted"] = predicted;
  j["tolerance"] = tolerance;
  j["pass"] = pass;
  j["diagnostics"] = diagnostics;
  j["seed"] = seed;
  return j.dump();
}

AxiomReport check_normalization(const FamilySpec& fs, int nlabels) {
  if (nlabels < 1) throw InvalidArgument("gk: need at least one label");
  AxiomReport r = base_report("normalization", fs);
  r.seed = kSeed;
  const bool iho = fs.id == FamilyId::iho;
  const auto labels = sample_labels(nlabels, iho ? 2.0 : 3.0, kSeed);
  double worst = 0.0;
  PhaseLabel worst_l{};
  if (iho) {
    for (const auto& l : labels) {
      const double d = std::abs(iho::iho_norm(fs.Ebar, fs.A, l) - 1.0);
      if (d > worst) worst = d, worst_l = l;
    }
  } else {
    const auto fp = to_fp(fs);
    for (const auto& l : labels) {
      const cplx o = freepart::k_overlap(fp, l, 0.0, l, 0.0, fs.phys);
      const double d = std::abs(o - cplx(1.0, 0.0));
      if (d > worst) worst = d, worst_l = l;
    }
  }
  r.measured = worst;
  r.predicted = 0.0;
  r.tolerance = iho ? 1e-4 : 1e-8;
  r.diagnostics = fmt("max |norm-1| over %d labels, worst at (q,p)=(%.4f,%.4f)",
                      nlabels, worst_l.q, worst_l.p);
  finish(r);
  return r;
}

AxiomReport check_continuity(const FamilySpec& fs) {
  AxiomReport r = base_report("continuity", fs);
  auto deficit = [&](double dq) -> double {
    if (fs.id == FamilyId::iho) {
      const cplx o = iho::iho_overlap(fs.Ebar, fs.A, {0.0, 0.0, 0.0}, 0.0,
                                      {dq, 0.0, 0.0}, 0.0);
      return 2.0 - 2.0 * o.real();
    }
    const auto fp = to_fp(fs);
    const cplx o = freepart::k_overlap(fp, {0.0, 0.0, 0.0}, 0.0,
                                       {dq, 0.0, 0.0}, 0.0, fs.phys);
    return 2.0 - 2.0 * o.real();
  };
  const double d4 = deficit(4e-3), d2 = deficit(2e-3), d1 = deficit(1e-3);
  r.measured = d1;
  r.predicted = 0.0;
  r.tolerance = 1e-4;
  r.diagnostics = fmt(
      "2-2Re<0|dq> at dq={4e-3,2e-3,1e-3}: %.3e, %.3e, %.3e; "
      "monotone=%s, ratio d(2e-3)/d(1e-3)=%.3f",
      d4, d2, d1, (d4 > d2 && d2 > d1) ? "yes" : "NO", d2 / d1);
  finish(r);
  return r;
}

AxiomReport check_identity_resolution(const FamilySpec& fs, const TestState& f,
                                      const TestState& g, double tol) {
  validate_test(f);
  validate_test(g);
  AxiomReport r = base_report("identity_resolution", fs);
  const double ref = test_inner(f, g);
  PlaneProblem pp;
  double rungs[3];
  const double hbar = is_free(fs.id) ? fs.phys.hbar : 1.0;

  std::shared_ptr<IhoPlane> pl;  // keeps the iho cache alive
  if (fs.id == FamilyId::free_gaussian) {
    const double kbar = fs.kbar, A = fs.A;
    pp.tol_out = 1e-10;
    pp.strip = adaptive_strip(
        [f, g, kbar, A, hbar](double q, double p) -> cplx {
          const cplx a = overlap_gaussian_family(f, q, p, kbar, A, hbar);
          const cplx b = overlap_gaussian_family(g, q, p, kbar, A, hbar);
          return a * std::conj(b) / (2.0 * M_PI * hbar);
        },
        1e-12);
    pp.pclip = [kbar, hbar](double) {
      return std::pair<double, double>(hbar * (-kbar - 12.0),
                                       hbar * (-kbar + 12.0));
    };
    rungs[0] = 3.0, rungs[1] = 6.0, rungs[2] = 12.0;
  } else if (fs.id == FamilyId::free_window) {
    const double k0 = fs.k0, k1 = fs.k1;
    const double wmin = std::min(f.width, g.width);
    pp.tol_out = 2e-7;
    pp.strip = adaptive_strip(
        [f, g, k0, k1, hbar](double q, double p) -> cplx {
          const cplx a = overlap_window_family(f, q, p, k0, k1, hbar);
          const cplx b = overlap_window_family(g, q, p, k0, k1, hbar);
          return a * std::conj(b) / (2.0 * M_PI * hbar);
        },
        1e-9);
    pp.pclip = [k0, k1, wmin, hbar](double) {
      return std::pair<double, double>(hbar * (-k1 - 6.0 / wmin),
                                       hbar * (-k0 + 6.0 / wmin));
    };
    // the sharp spectral edges make the defect decay like 1/R
    rungs[0] = 530.0, rungs[1] = 1060.0, rungs[2] = 2120.0;
  } else if (fs.id == FamilyId::iho) {
    pl = make_iho_plane(fs.Ebar, fs.A, f, g);
    pp = iho_plane_problem(pl);
    // defect tracks the log-normal fiducial mass beyond s = ln R; only
    // small A reaches 1e-3 at desk-scale radii
    rungs[0] = 10.0, rungs[1] = 20.0, rungs[2] = 40.0;
  } else {
    throw InvalidArgument("gk: identity resolution not supported for bump");
  }

  const auto rr = rung_integrate(pp, rungs, ref);
  r.measured = rr.value.real();
  r.predicted = ref;
  r.tolerance = tol;
  const bool mono = rr.defect[0] > rr.defect[1] && rr.defect[1] > rr.defect[2];
  r.diagnostics = fmt(
      "truncation radii {%g, %g, %g}, defects {%.3e, %.3e, %.3e}, "
      "monotone=%s; f=(c=%g,w=%g,h=%d) g=(c=%g,w=%g,h=%d); |Im|=%.1e",
      rr.rung[0], rr.rung[1], rr.rung[2], rr.defect[0], rr.defect[1],
      rr.defect[2], mono ? "yes" : "NO", f.center, f.width, f.hermite,
      g.center, g.width, g.hermite, std::abs(rr.value.imag()));
  finish(r);
  if (!mono) r.pass = false;  // convergence certification failed
  return r;
}

AxiomReport check_temporal_stability(const FamilySpec& fs,
                                     const PhaseLabel& label, double tau) {
  AxiomReport r = base_report("temporal_stability", fs);
  if (fs.id == FamilyId::iho) {
    r.measured = iho::stability_deviation_x(fs.Ebar, fs.A, tau);
    r.predicted = tau * tau / (4.0 * fs.A);
    r.tolerance = 0.1 * r.predicted;
    // re-labeling: evolving |q,p,0> by tau must give the label (q,p,tau)
    const cplx o = iho::iho_overlap(fs.Ebar, fs.A, {label.q, label.p, 0.0},
                                    tau, {label.q, label.p, tau}, 0.0);
    const double rel = std::abs(o - cplx(1.0, 0.0));
    r.diagnostics = fmt(
        "fiducial deviation vs t^2/4A at t=%g; re-labeling defect %.2e "
        "(gate 1e-3)",
        tau, rel);
    if (rel > 1e-3) r.measured = std::max(r.measured, r.predicted + 1.0);
    finish(r);
    return r;
  }
  const auto fp = to_fp(fs);
  const double ktilde =
      fp.family == Family::gaussian ? fs.kbar : 0.5 * (fs.k0 + fs.k1);
  const auto [meas, pred] =
      freepart::stability_deviation(fp, label, tau, ktilde, fs.phys);
  r.measured = meas;
  r.predicted = pred.remainder_norm_sq;
  // the Gaussian-family closed form from the source overstates the exact
  // deviation (ratio ~ 1/4); reported honestly against its stated 15% gate
  r.tolerance = (fp.family == Family::gaussian ? 0.15 : 0.1) * r.predicted;
  r.diagnostics = fmt(
      "phase-minimized deviation at tau=%g, ktilde=%g; ratio "
      "measured/predicted=%.4f; leading_phase=%.3e; shifted label q=%g",
      tau, ktilde, meas / r.predicted, pred.leading_phase,
      pred.shifted_label.q);
  finish(r);
  return r;
}

AxiomReport check_action_identity(const FamilySpec& fs, double J,
                                  double omega) {
  AxiomReport r = base_report("action_identity", fs);
  r.predicted = 0.0;
  double Jt[3];
  double defect0, gate;
  if (fs.id == FamilyId::iho) {
    const auto sys = iho::action_system_solve(fs.Ebar, fs.A, J, omega);
    for (int t = 0; t < 3; ++t)
      Jt[t] = iho::iho_energy_x(fs.Ebar, fs.A,
                                {sys.solution.q, sys.solution.p, double(t)}) /
              omega;
    defect0 = std::abs(omega * Jt[0] - omega * J);
    gate = 1e-3 * (1.0 + std::abs(J));
    r.tolerance = 1e-3;
    r.diagnostics =
        fmt("label (q,p)=(%.6f,%.6f), residuals (%.1e, %.1e); ",
            sys.solution.q, sys.solution.p, sys.residual1, sys.residual2);
  } else {
    const auto fp = to_fp(fs);
    const auto label = freepart::action_invert(fp, J, omega, fs.phys);
    defect0 =
        std::abs(freepart::energy_expectation(fp, label, fs.phys) - omega * J);
    for (int t = 0; t < 3; ++t) {
      hilbert::StateEvaluator st =
          fp.family == Family::window
              ? freepart::evolve_window(fp.k0, fp.k1, label, double(t),
                                        fs.phys)
              : freepart::evolve_gaussian(fp.kbar, fp.A, label, double(t),
                                          fs.phys);
      // <H> of the evolved state by x-space quadrature; conserved exactly
      Jt[t] = hilbert::moment_P(st, 2, fs.phys.hbar, 1e-10) /
              (2.0 * fs.phys.mass * omega);
    }
    gate = (fp.family == Family::window ? 1e-4 : 1e-7) * (1.0 + std::abs(J));
    r.tolerance = 1e-10;
    r.diagnostics = fmt("label (q,p)=(%.6f,%.6f); ", label.q, label.p);
  }
  const double spread =
      std::max({std::abs(Jt[1] - Jt[0]), std::abs(Jt[2] - Jt[0]),
                std::abs(Jt[1] - Jt[2])});
  r.measured = spread <= gate ? defect0 : std::max(defect0, spread);
  r.diagnostics +=
      fmt("J at tau={0,1,2}: {%.10f, %.10f, %.10f}, spread %.2e (gate %.1e)",
          Jt[0], Jt[1], Jt[2], spread, gate);
  finish(r);
  return r;
}

AxiomReport default_check(const FamilySpec& fs, const std::string& axiom) {
  const bool iho = fs.id == FamilyId::iho;
  if (axiom == "normalization") return check_normalization(fs, iho ? 5 : 20);
  if (axiom == "continuity") return check_continuity(fs);
  if (fs.id == FamilyId::free_bump)
    throw InvalidArgument("gk: bump family has no closed forms for " + axiom);
  if (axiom == "identity_resolution") {
    switch (fs.id) {
      case FamilyId::free_gaussian:
        return check_identity_resolution(fs, {-0.7, 1.0, 0}, {0.9, 1.0, 0},
                                         1e-6);
      case FamilyId::free_window:
        return check_identity_resolution(fs, {0.0, 1.0, 0}, {0.0, 1.0, 0},
                                         1e-4);
      default:
        return check_identity_resolution(fs, {0.0, 1.0, 0}, {0.0, 1.0, 0},
                                         1e-3);
    }
  }
  if (axiom == "temporal_stability") {
    switch (fs.id) {
      case FamilyId::free_gaussian:
        return check_temporal_stability(fs, {0.0, 0.5, 0.0}, 1.0);
      case FamilyId::free_window:
        return check_temporal_stability(fs, {0.0, 0.3, 0.0}, 0.2);
      default:
        return check_temporal_stability(fs, {0.4, 0.3, 0.0},
                                        std::min(2.0, 0.5 * std::sqrt(fs.A)));
    }
  }
  if (axiom == "action_identity") {
    if (iho) {
      const double w = M_PI / 3.0;
      return check_action_identity(fs, (fs.Ebar + 0.5) / w, w);
    }
    // J = family minimum + 0.5 at omega = 1
    const auto fp = to_fp(fs);
    const double hbar = fs.phys.hbar, m = fs.phys.mass;
    double b, c0;
    if (fp.family == Family::window) {
      const double C2 = 1.0 / (fp.k1 - fp.k0);
      b = hbar * C2 * (fp.k1 * fp.k1 - fp.k0 * fp.k0);
      c0 = C2 * hbar * hbar * (std::pow(fp.k1, 3) - std::pow(fp.k0, 3)) / 3.0;
    } else {
      b = 2.0 * hbar * fp.kbar;
      c0 = hbar * hbar * fp.kbar * fp.kbar + hbar * hbar / (4.0 * fp.A);
    }
    const double Jmin = (c0 - 0.25 * b * b) / (2.0 * m);
    return check_action_identity(fs, Jmin + 0.5, 1.0);
  }
  throw InvalidArgument("gk: unknown axiom '" + axiom + "'");
}

std::vector<AxiomReport> axiom_suite(const FamilySpec& fs) {
  std::vector<AxiomReport> out;
  out.push_back(default_check(fs, "normalization"));
  out.push_back(default_check(fs, "continuity"));
  if (fs.id == FamilyId::free_bump) return out;
  out.push_back(default_check(fs, "identity_resolution"));
  out.push_back(default_check(fs, "temporal_stability"));
  out.push_back(default_check(fs, "action_identity"));
  return out;
}

std::vector<AxiomReport> iho_axiom_suite(double Ebar, double A) {
  FamilySpec fs;
  fs.id = FamilyId::iho;
  fs.Ebar = Ebar;
  fs.A = A;
  return axiom_suite(fs);
}

}  // namespace ccs::gk
