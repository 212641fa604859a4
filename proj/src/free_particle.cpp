#include "free_particle.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "errors.hpp"

namespace ccs::freepart {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2 pi)
}

WindowFiducialParams make_window_params(double k0, double k1) {
  if (!(k0 < k1)) throw InvalidArgument("window: need k0 < k1");
  return WindowFiducialParams{k0, k1, 1.0 / std::sqrt(k1 - k0)};
}

GaussianFiducialParams make_gaussian_params(double kbar, double A) {
  if (!(A > 0.0)) throw InvalidArgument("gaussian: need A > 0");
  return GaussianFiducialParams{kbar, A, std::pow(2.0 * A / M_PI, 0.25)};
}

StateEvaluator window_fiducial(double k0, double k1) {
  const auto wp = make_window_params(k0, k1);
  const double C = wp.C, dk = k1 - k0;
  StateEvaluator out;
  // Psi(x) = C [e^{i k1 x} - e^{i k0 x}] / (i sqrt(2 pi) x); near x=0 the
  // quotient switches to a 4-term series in (i dk x) to avoid cancellation.
  out.amplitude = [C, k0, k1, dk](double x) -> cplx {
    const cplx pre = C * kInvSqrt2Pi * std::exp(cplx(0.0, k0 * x));
    if (std::abs(x * dk) < 1e-4) {
      const cplx u(0.0, dk * x);
      return pre * dk * (1.0 + u / 2.0 + u * u / 6.0 + u * u * u / 24.0);
    }
    return pre * (std::exp(cplx(0.0, dk * x)) - 1.0) / cplx(0.0, x);
  };
  out.derivative = [C, k0, k1, dk](double x) -> cplx {
    const cplx pre = C * kInvSqrt2Pi * std::exp(cplx(0.0, k0 * x));
    if (std::abs(x * dk) < 1e-4) {
      const cplx u(0.0, dk * x);
      const cplx g = dk * (1.0 + u / 2.0 + u * u / 6.0 + u * u * u / 24.0);
      const cplx gp = dk * cplx(0.0, dk) * (0.5 + u / 3.0 + u * u / 8.0);
      return pre * (cplx(0.0, k0) * g + gp);
    }
    const cplx num = std::exp(cplx(0.0, dk * x)) - 1.0;
    const cplx f = num / cplx(0.0, x);
    const cplx fp = (cplx(0.0, dk) * std::exp(cplx(0.0, dk * x))) / cplx(0.0, x) - f / x;
    return pre * (cplx(0.0, k0) * f + fp);
  };
  out.hints = {0.0};
  return out;
}

StateEvaluator gaussian_fiducial(double kbar, double A) {
  const auto gp = make_gaussian_params(kbar, A);
  const double pref = gp.C_A / std::sqrt(2.0 * A);
  StateEvaluator out;
  out.amplitude = [pref, kbar, A](double x) -> cplx {
    return pref * std::exp(cplx(-x * x / (4.0 * A), kbar * x));
  };
  out.derivative = [pref, kbar, A](double x) -> cplx {
    return pref * std::exp(cplx(-x * x / (4.0 * A), kbar * x)) *
           cplx(-x / (2.0 * A), kbar);
  };
  out.hints = {0.0};
  return out;
}

namespace {

double bump_weight(double k, double k0, double k1) {
  if (k <= k0 || k >= k1) return 0.0;
  const double a = k1 - k, b = k - k0;
  return std::exp(-1.0 / (a * a) - 1.0 / (b * b));
}

// Numeric normalization constants are cached per window.
double bump_norm_constant(double k0, double k1) {
  static std::map<std::pair<double, double>, double> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({k0, k1});
    if (it != cache.end()) return it->second;
  }
  auto w2 = [k0, k1](double k) -> cplx {
    const double w = bump_weight(k, k0, k1);
    return cplx(w * w, 0.0);
  };
  auto r = num::integrate_adaptive(w2, k0, k1, 1e-13);
  const double N = 1.0 / std::sqrt(r.value.real());
  std::lock_guard<std::mutex> lock(mu);
  cache[{k0, k1}] = N;
  return N;
}

}  // namespace

StateEvaluator bump_fiducial(double k0, double k1) {
  if (!(k0 < k1)) throw InvalidArgument("bump: need k0 < k1");
  const double N = bump_norm_constant(k0, k1);
  const double xcap = 2000.0;  // beyond this |Psi| <= O(1/x^2) is negligible
  auto kernel = [k0, k1, N](double x, bool deriv) -> cplx {
    auto f = [k0, k1, x, deriv](double k) -> cplx {
      const double w = bump_weight(k, k0, k1);
      cplx v = w * std::exp(cplx(0.0, k * x));
      if (deriv) v *= cplx(0.0, k);
      return v;
    };
    auto r = num::integrate_adaptive(f, k0, k1, 1e-11, 1L << 17);
    return N * kInvSqrt2Pi * r.value;
  };
  StateEvaluator out;
  out.amplitude = [kernel, xcap](double x) -> cplx {
    if (std::abs(x) > xcap) return cplx(0.0, 0.0);
    return kernel(x, false);
  };
  out.derivative = [kernel, xcap](double x) -> cplx {
    if (std::abs(x) > xcap) return cplx(0.0, 0.0);
    return kernel(x, true);
  };
  out.hints = {0.0};
  return out;
}

StateEvaluator fiducial(const FiducialParams& fp) {
  switch (fp.family) {
    case Family::window:
      return window_fiducial(fp.k0, fp.k1);
    case Family::gaussian:
      return gaussian_fiducial(fp.kbar, fp.A);
    case Family::bump:
      return bump_fiducial(fp.k0, fp.k1);
  }
  throw InvalidArgument("unknown family");
}

StateEvaluator coherent_state(const StateEvaluator& fid, const PhaseLabel& label,
                              const PhysicalParams& params) {
  return hilbert::displace(fid, label, params);
}

StateEvaluator evolve_window(double k0, double k1, const PhaseLabel& label,
                             double tau, const PhysicalParams& params,
                             bool* used_fallback) {
  hilbert::validate(params);
  const auto wp = make_window_params(k0, k1);
  const double a = params.hbar * tau / (2.0 * params.mass);
  const double kap0 = k0 + label.p / params.hbar;
  const double kap1 = k1 + label.p / params.hbar;
  const double kmax = std::max(std::abs(kap0), std::abs(kap1));
  if (used_fallback) *used_fallback = false;
  if (std::abs(a) * kmax * kmax < 1e-13) {
    // effectively tau = 0: the coherent state itself
    return coherent_state(window_fiducial(k0, k1), label, params);
  }
  if (std::abs(a) < 1e-10) {
    // Faddeeva closed form loses accuracy; fall back to k-quadrature.
    if (used_fallback) *used_fallback = true;
    return evolve_window_quadrature(k0, k1, label, tau, params);
  }
  const double C = wp.C, q = label.q;
  // I(X) = int_{kap0}^{kap1} exp(i k X - i a k^2) dk
  //      = (1/2) sqrt(pi/alpha) [E0 w(i zeta0) - E1 w(i zeta1)],
  // alpha = i a, E_j = exp(-alpha k_j^2 + i k_j X),
  // i zeta_j = i sqrt(alpha) k_j + X / (2 sqrt(alpha)).
  const cplx alpha(0.0, a);
  const cplx sa = std::sqrt(alpha);  // principal: a>0 -> e^{i pi/4} sqrt(a)
  const cplx half_sqrt_pi_over_alpha = 0.5 * std::sqrt(M_PI / alpha);
  auto core = [=](double x, bool deriv) -> cplx {
    const double X = x - q;
    const cplx E0 = std::exp(-alpha * kap0 * kap0 + cplx(0.0, kap0 * X));
    const cplx E1 = std::exp(-alpha * kap1 * kap1 + cplx(0.0, kap1 * X));
    const cplx iz0 = cplx(0.0, 1.0) * sa * kap0 + X / (2.0 * sa);
    const cplx iz1 = cplx(0.0, 1.0) * sa * kap1 + X / (2.0 * sa);
    // For large |X| both arguments sit in the lower half plane, where the
    // reflection w(z) = 2 e^{-z^2} - w(-z) applies. The two reflection
    // terms satisfy E_j 2 e^{-z_j^2} = 2 e^{-X^2/(4 alpha)} identically, so
    // they cancel in the difference; computing them numerically would leave
    // only the O(X^2 eps) phase roundoff. Cancel them analytically instead.
    cplx I;
    if (iz0.imag() < 0.0 && iz1.imag() < 0.0) {
      I = half_sqrt_pi_over_alpha *
          (E1 * num::faddeeva(-iz1) - E0 * num::faddeeva(-iz0));
    } else {
      I = half_sqrt_pi_over_alpha *
          (E0 * num::faddeeva(iz0) - E1 * num::faddeeva(iz1));
    }
    if (!deriv) return C * kInvSqrt2Pi * I;
    const cplx Ip = (cplx(0.0, 1.0) * (E0 - E1) - X * I) / (2.0 * alpha);
    return C * kInvSqrt2Pi * Ip;
  };
  StateEvaluator out;
  out.amplitude = [core](double x) { return core(x, false); };
  out.derivative = [core](double x) { return core(x, true); };
  out.hints = {q};
  return out;
}

StateEvaluator evolve_window_quadrature(double k0, double k1,
                                        const PhaseLabel& label, double tau,
                                        const PhysicalParams& params) {
  hilbert::validate(params);
  const auto wp = make_window_params(k0, k1);
  const double a = params.hbar * tau / (2.0 * params.mass);
  const double kap0 = k0 + label.p / params.hbar;
  const double kap1 = k1 + label.p / params.hbar;
  const double C = wp.C, q = label.q;
  auto core = [=](double x, bool deriv) -> cplx {
    const double X = x - q;
    auto f = [=](double k) -> cplx {
      cplx v = std::exp(cplx(0.0, k * X - a * k * k));
      if (deriv) v *= cplx(0.0, k);
      return v;
    };
    auto r = num::integrate_adaptive(f, kap0, kap1, 1e-12, 1L << 16);
    return C * kInvSqrt2Pi * r.value;
  };
  StateEvaluator out;
  out.amplitude = [core](double x) { return core(x, false); };
  out.derivative = [core](double x) { return core(x, true); };
  out.hints = {q};
  return out;
}

StateEvaluator evolve_gaussian(double kbar, double A, const PhaseLabel& label,
                               double tau, const PhysicalParams& params) {
  hilbert::validate(params);
  const auto gp = make_gaussian_params(kbar, A);
  const double a = params.hbar * tau / (2.0 * params.mass);
  const double kc = kbar + label.p / params.hbar;
  const double q = label.q;
  const cplx B(A, a);
  const cplx pref = gp.C_A * kInvSqrt2Pi * std::sqrt(M_PI / B);
  auto core = [=](double x, bool deriv) -> cplx {
    const double X = x - q;
    const cplx u = 2.0 * A * kc + cplx(0.0, X);
    const cplx val = pref * std::exp(u * u / (4.0 * B) - A * kc * kc);
    if (!deriv) return val;
    return val * cplx(0.0, 1.0) * u / (2.0 * B);
  };
  StateEvaluator out;
  out.amplitude = [core](double x) { return core(x, false); };
  out.derivative = [core](double x) { return core(x, true); };
  out.hints = {q};
  return out;
}

cplx k_overlap(const FiducialParams& fp, const PhaseLabel& la, double tau_a,
               const PhaseLabel& lb, double tau_b, const PhysicalParams& params) {
  hilbert::validate(params);
  const double hbar = params.hbar, m = params.mass;
  const double aa = hbar * tau_a / (2.0 * m), ab = hbar * tau_b / (2.0 * m);
  const double sa = la.p / hbar, sb = lb.p / hbar;  // momentum shifts
  // conj(Phi_a^)(k) Phi_b^(k) =
  //   e^{i k (qa - qb)} e^{i (aa - ab) k^2} F(k - sa) F(k - sb), F real
  std::function<double(double)> F;
  double lo, hi;
  if (fp.family == Family::window) {
    const auto wp = make_window_params(fp.k0, fp.k1);
    const double C = wp.C, k0 = fp.k0, k1 = fp.k1;
    F = [C, k0, k1](double k) {
      return (k > k0 && k < k1) ? C : 0.0;
    };
    lo = std::max(fp.k0 + sa, fp.k0 + sb);
    hi = std::min(fp.k1 + sa, fp.k1 + sb);
  } else if (fp.family == Family::gaussian) {
    const auto gp = make_gaussian_params(fp.kbar, fp.A);
    const double CA = gp.C_A, kb = fp.kbar, A = fp.A;
    F = [CA, kb, A](double k) {
      const double d = k - kb;
      return CA * std::exp(-A * d * d);
    };
    const double hw = 9.0 / std::sqrt(fp.A) + 0.5 * std::abs(sa - sb);
    const double mid = fp.kbar + 0.5 * (sa + sb);
    lo = mid - hw;
    hi = mid + hw;
  } else {
    const double N = bump_norm_constant(fp.k0, fp.k1);
    const double k0 = fp.k0, k1 = fp.k1;
    F = [N, k0, k1](double k) { return N * bump_weight(k, k0, k1); };
    lo = std::max(fp.k0 + sa, fp.k0 + sb);
    hi = std::min(fp.k1 + sa, fp.k1 + sb);
  }
  if (!(lo < hi)) return cplx(0.0, 0.0);
  auto f = [&](double k) -> cplx {
    const double w = F(k - sa) * F(k - sb);
    if (w == 0.0) return cplx(0.0, 0.0);
    return w * std::exp(cplx(0.0, k * (la.q - lb.q) + (aa - ab) * k * k));
  };
  auto r = num::integrate_adaptive(f, lo, hi, 1e-12, 1L << 17);
  return r.value;
}

namespace {

// |<shifted | evolved>| reduces to |int rho(k) e^{-i a k^2} dk| with rho the
// momentum density of the fiducial; computed here by direct k-quadrature.
double overlap_modulus(const FiducialParams& fp, double a) {
  if (fp.family == Family::gaussian) {
    const double A = fp.A, kb = fp.kbar;
    const double CA2 = std::sqrt(2.0 * A / M_PI);
    auto f = [=](double k) -> cplx {
      const double d = k - kb;
      return CA2 * std::exp(cplx(-2.0 * A * d * d, -a * k * k));
    };
    const double hw = 8.5 / std::sqrt(2.0 * A);
    auto r = num::integrate_adaptive(f, kb - hw, kb + hw, 1e-12, 1L << 16);
    return std::abs(r.value);
  }
  if (fp.family == Family::window) {
    const double C2 = 1.0 / (fp.k1 - fp.k0);
    auto f = [=](double k) -> cplx { return std::exp(cplx(0.0, -a * k * k)); };
    auto r = num::integrate_adaptive(f, fp.k0, fp.k1, 1e-12, 1L << 16);
    return C2 * std::abs(r.value);
  }
  // bump: same integral against the normalized weight squared
  const double N = 1.0;  // handled via relative weight below
  (void)N;
  auto w2int = num::integrate_adaptive(
      [&fp](double k) -> cplx {
        const double w = bump_weight(k, fp.k0, fp.k1);
        return cplx(w * w, 0.0);
      },
      fp.k0, fp.k1, 1e-13);
  auto r = num::integrate_adaptive(
      [&fp, a](double k) -> cplx {
        const double w = bump_weight(k, fp.k0, fp.k1);
        return w * w * std::exp(cplx(0.0, -a * k * k));
      },
      fp.k0, fp.k1, 1e-12);
  return std::abs(r.value) / w2int.value.real();
}

}  // namespace

std::pair<double, StabilityPrediction> stability_deviation(
    const FiducialParams& fp, const PhaseLabel& label, double tau,
    double ktilde, const PhysicalParams& params) {
  hilbert::validate(params);
  const double hbar = params.hbar, m = params.mass;
  const double a = hbar * tau / (2.0 * m);
  // momentum densities are label-independent, so the shifted-vs-evolved
  // overlap depends only on the fiducial shape and a
  const double measured = std::max(0.0, 2.0 - 2.0 * overlap_modulus(fp, a));

  StabilityPrediction pred;
  pred.shifted_label = PhaseLabel{label.q + label.p * tau / m, label.p, label.tau};
  pred.leading_phase =
      tau * (label.p * label.p - hbar * hbar * ktilde * ktilde) / (2.0 * m * hbar);
  if (fp.family == Family::gaussian) {
    pred.order_tag = OrderTag::O_invA;
    const double v = tau * hbar * fp.kbar / m;
    pred.remainder_norm_sq = v * v / fp.A;  // the source text's closed form
  } else {
    const double kmid = 0.5 * (fp.k0 + fp.k1);
    const double Delta = 0.5 * (fp.k1 - fp.k0);
    const double ell = kmid - ktilde;
    pred.order_tag = (std::abs(ell) > 1e-12) ? OrderTag::O_ell : OrderTag::O_Delta;
    // leading-order variance of the quadratic phase over the window:
    // Var_{k~U[k0,k1]}(a k^2) = a^2 (4 kmid^2 Delta^2/3 + 4 Delta^4/45)
    pred.remainder_norm_sq =
        a * a * (4.0 * kmid * kmid * Delta * Delta / 3.0 +
                 4.0 * std::pow(Delta, 4) / 45.0);
  }
  return {measured, pred};
}

double energy_expectation(const FiducialParams& fp, const PhaseLabel& label,
                          const PhysicalParams& params) {
  hilbert::validate(params);
  const double hbar = params.hbar, m = params.mass, p = label.p;
  if (fp.family == Family::window) {
    const double C2 = 1.0 / (fp.k1 - fp.k0);
    return (1.0 / (2.0 * m)) *
           (C2 * hbar * hbar * (std::pow(fp.k1, 3) - std::pow(fp.k0, 3)) / 3.0 +
            hbar * p * C2 * (fp.k1 * fp.k1 - fp.k0 * fp.k0) + p * p);
  }
  if (fp.family == Family::gaussian) {
    return hbar * hbar * fp.kbar * fp.kbar / (2.0 * m) +
           hbar * hbar / (8.0 * m * fp.A) + hbar * p * fp.kbar / m +
           p * p / (2.0 * m);
  }
  // bump: <H> = (<P^2> + 2 p <P> + p^2) / 2m with fiducial moments in k-space
  auto w2int = num::integrate_adaptive(
      [&fp](double k) -> cplx {
        const double w = bump_weight(k, fp.k0, fp.k1);
        return cplx(w * w, 0.0);
      },
      fp.k0, fp.k1, 1e-13);
  auto mom = [&](int n) {
    auto r = num::integrate_adaptive(
        [&fp, n](double k) -> cplx {
          const double w = bump_weight(k, fp.k0, fp.k1);
          return cplx(std::pow(k, n) * w * w, 0.0);
        },
        fp.k0, fp.k1, 1e-13);
    return r.value.real() / w2int.value.real();
  };
  const double k1m = mom(1), k2m = mom(2);
  return (hbar * hbar * k2m + 2.0 * p * hbar * k1m + p * p) / (2.0 * m);
}

PhaseLabel action_invert(const FiducialParams& fp, double J, double omega,
                         const PhysicalParams& params) {
  hilbert::validate(params);
  const double hbar = params.hbar, m = params.mass;
  // <H>(p) = (p^2 + b p + c0)/2m = omega J, independent of q
  double b = 0.0, c0 = 0.0;
  if (fp.family == Family::window) {
    const double C2 = 1.0 / (fp.k1 - fp.k0);
    b = hbar * C2 * (fp.k1 * fp.k1 - fp.k0 * fp.k0);
    c0 = C2 * hbar * hbar * (std::pow(fp.k1, 3) - std::pow(fp.k0, 3)) / 3.0;
  } else if (fp.family == Family::gaussian) {
    b = 2.0 * hbar * fp.kbar;
    c0 = hbar * hbar * fp.kbar * fp.kbar + hbar * hbar / (4.0 * fp.A);
  } else {
    throw InvalidArgument("action_invert: bump family not supported");
  }
  const double disc = b * b / 4.0 - (c0 - 2.0 * m * omega * J);
  if (disc < 0.0)
    throw BelowGroundAction("action_invert: J below the family minimum");
  const double p = -b / 2.0 + std::sqrt(disc);
  const double s = std::sin(omega);
  if (std::abs(s) < 1e-300)
    throw InvalidArgument("action_invert: cot(omega) undefined");
  const double q = p * std::cos(omega) / s;
  return PhaseLabel{q, p, 0.0};
}

LimitLadder limit_expectations(const FiducialParams& fp, const PhaseLabel& label,
                               char op, const PhysicalParams& params) {
  hilbert::validate(params);
  LimitLadder lad;
  const double hbar = params.hbar, m = params.mass, p = label.p;
  if (fp.family == Family::window) {
    const double kbar = 0.5 * (fp.k0 + fp.k1);
    for (double Delta : {0.4, 0.2, 0.1, 0.05, 0.025}) {
      FiducialParams rung = fp;
      rung.k0 = kbar - Delta;
      rung.k1 = kbar + Delta;
      lad.rung.push_back(Delta);
      lad.value.push_back(op == 'I' ? 1.0
                                    : energy_expectation(rung, label, params));
    }
    if (op == 'I') {
      lad.extrapolated = 1.0;
      lad.stated_limit = 1.0;
    } else {
      // <H>(Delta) is linear in Delta^2: two-point Richardson is exact
      const size_t n = lad.value.size();
      const double d1 = lad.rung[n - 2] * lad.rung[n - 2];
      const double d2 = lad.rung[n - 1] * lad.rung[n - 1];
      lad.extrapolated =
          lad.value[n - 1] + (lad.value[n - 1] - lad.value[n - 2]) * d2 / (d1 - d2);
      const double full = (hbar * kbar + p) * (hbar * kbar + p) / (2.0 * m);
      lad.stated_limit = p * p / (2.0 * m);  // as displayed in the source
      lad.discrepancy_flagged = std::abs(lad.extrapolated - lad.stated_limit) >
                                1e-9 * (1.0 + std::abs(full));
    }
    return lad;
  }
  if (fp.family == Family::gaussian) {
    for (double A : {10.0, 100.0, 1000.0, 10000.0}) {
      FiducialParams rung = fp;
      rung.A = A;
      lad.rung.push_back(A);
      lad.value.push_back(op == 'I' ? 1.0
                                    : energy_expectation(rung, label, params));
    }
    if (op == 'I') {
      lad.extrapolated = 1.0;
      lad.stated_limit = 1.0;
    } else {
      // <H>(A) is linear in 1/A: two-point Richardson is exact
      const size_t n = lad.value.size();
      const double i1 = 1.0 / lad.rung[n - 2], i2 = 1.0 / lad.rung[n - 1];
      lad.extrapolated =
          lad.value[n - 1] + (lad.value[n - 1] - lad.value[n - 2]) * i2 / (i1 - i2);
      lad.stated_limit =
          (hbar * fp.kbar + p) * (hbar * fp.kbar + p) / (2.0 * m);
      lad.discrepancy_flagged =
          std::abs(lad.extrapolated - lad.stated_limit) > 1e-9;
    }
    return lad;
  }
  throw InvalidArgument("limit_expectations: bump family not supported");
}

}  // namespace ccs::freepart
