#include "hilbert.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace ccs::hilbert {

void validate(const PhysicalParams& p) {
  if (!(p.hbar > 0.0)) throw InvalidArgument("hbar must be > 0");
  if (!(p.mass > 0.0)) throw InvalidArgument("mass must be > 0");
  if (!(p.omega >= 0.0)) throw InvalidArgument("omega must be >= 0");
}

StateEvaluator displace(const StateEvaluator& psi, const PhaseLabel& label,
                        const PhysicalParams& params) {
  validate(params);
  const double q = label.q, pov = label.p / params.hbar;
  auto amp = psi.amplitude;
  auto der = psi.derivative;
  StateEvaluator out;
  out.amplitude = [amp, q, pov](double x) -> cplx {
    const double u = x - q;
    return std::exp(cplx(0.0, pov * u)) * amp(u);
  };
  out.derivative = [amp, der, q, pov](double x) -> cplx {
    const double u = x - q;
    return std::exp(cplx(0.0, pov * u)) * (der(u) + cplx(0.0, pov) * amp(u));
  };
  out.hints = psi.hints;
  for (double& h : out.hints) h += q;
  return out;
}

cplx inner_product(const StateEvaluator& phi, const StateEvaluator& psi,
                   double tol) {
  std::vector<double> hints = phi.hints;
  hints.insert(hints.end(), psi.hints.begin(), psi.hints.end());
  auto f = [&phi, &psi](double x) -> cplx {
    return std::conj(phi.amplitude(x)) * psi.amplitude(x);
  };
  auto r = num::integrate_line(f, tol, hints);
  if (!r.converged && r.error_estimate > 100 * tol)
    throw NonConvergence("inner_product: quadrature did not converge");
  return r.value;
}

double norm(const StateEvaluator& psi, double tol) {
  return std::sqrt(std::abs(inner_product(psi, psi, tol)));
}

double continuity_modulus(const StateEvaluator& s1, const StateEvaluator& s2) {
  for (const StateEvaluator* s : {&s1, &s2}) {
    const double n = norm(*s, 1e-8);
    if (std::abs(n - 1.0) > 1e-6)
      throw NotNormalized("continuity_modulus: state norm deviates from 1");
  }
  const double m = 2.0 - 2.0 * inner_product(s1, s2, 1e-10).real();
  return std::max(m, 0.0);
}

namespace {

// Dyadic tail panels [2^k, 2^{k+1}] of |x|^order |psi|^2 on both sides.
// Persistently non-decaying panel sums mean the moment does not exist.
void diagnose_tail(const StateEvaluator& psi, int order) {
  for (double side : {1.0, -1.0}) {
    std::vector<double> panels;
    for (int k = 3; k <= 13; ++k) {
      const double a = std::pow(2.0, k), b = 2.0 * a;
      auto f = [&psi, order, side](double t) -> cplx {
        const double x = side * t;
        const cplx v = psi.amplitude(x);
        return std::pow(t, order) * std::norm(v);
      };
      auto r = num::integrate_adaptive(f, a, b, 1e-13, 1L << 13);
      panels.push_back(std::abs(r.value.real()));
    }
    int bad = 0;
    for (size_t i = 1; i < panels.size(); ++i) {
      if (panels[i] > 0.6 * panels[i - 1] && panels[i] > 1e-12)
        ++bad;
      else
        bad = 0;
      if (bad >= 3)
        throw DomainError(
            "moment integrand tails do not decay: state outside operator "
            "domain");
    }
  }
}

}  // namespace

double moment_Q(const StateEvaluator& psi, int order, double tol) {
  if (order < 1 || order > 2) throw InvalidArgument("moment_Q: order in {1,2}");
  diagnose_tail(psi, order);
  auto f = [&psi, order](double x) -> cplx {
    return std::pow(x, order) * std::norm(psi.amplitude(x));
  };
  auto r = num::integrate_line(f, tol, psi.hints);
  return r.value.real();
}

double moment_P(const StateEvaluator& psi, int order, double hbar, double tol) {
  if (order < 1 || order > 2) throw InvalidArgument("moment_P: order in {1,2}");
  if (order == 1) {
    auto f = [&psi](double x) -> cplx {
      return std::conj(psi.amplitude(x)) * psi.derivative(x);
    };
    auto r = num::integrate_line(f, tol, psi.hints);
    return hbar * r.value.imag();
  }
  auto f = [&psi](double x) -> cplx {
    return cplx(std::norm(psi.derivative(x)), 0.0);
  };
  auto r = num::integrate_line(f, tol, psi.hints);
  return hbar * hbar * r.value.real();
}

}  // namespace ccs::hilbert
