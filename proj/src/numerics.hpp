// Numerical backbone: adaptive Gauss-Kronrod quadrature (finite, mapped
// infinite, Gaussian-weighted), Gauss-Hermite rules, the Faddeeva function,
// complex log-gamma, an adaptive second-order ODE integrator, and small
// Newton root solvers. All functions are pure and reentrant.
#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace ccs::num {

using cplx = std::complex<double>;

struct QuadResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
  long evaluations = 0;
  bool converged = false;
};

using Integrand = std::function<cplx(double)>;

// Panel-adaptive G7K15 on a finite interval. Throws NonFinite if the
// integrand returns NaN/inf; on budget exhaustion returns the best
// estimate with converged=false.
QuadResult integrate_adaptive(const Integrand& f, double a, double b,
                              double tol = 1e-10, long max_evals = 1L << 15);

// Integral over the whole real line through the rational map x = t/(1-t^2).
// hints: abscissae (in x) where the integrand is singular/stationary; panels
// are split there.
QuadResult integrate_line(const Integrand& f, double tol = 1e-10,
                          const std::vector<double>& hints = {},
                          long max_evals = 1L << 16);

// \int exp(-A (E-center)^2) g(E) dE over the effective support.
QuadResult integrate_gaussian_weight(const Integrand& g, double center,
                                     double A, double tol = 1e-10);

// Gauss-Hermite rule for weight exp(-u^2) on (-inf, inf).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
HermiteRule hermite_rule(int n);

// w(z) = exp(-z^2) erfc(-iz).
cplx faddeeva(cplx z);

// Principal-branch log Gamma(z); PoleError at non-positive integers.
cplx log_gamma_complex(cplx z);

struct OdeSolution {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yp;
  std::vector<double> local_error;
};

// rhs(x, y, y') -> y''.
using Rhs2 = std::function<double(double, double, double)>;

// Adaptive Dormand-Prince integration of y'' = rhs(x,y,y') from x0 to x1
// (either direction), recording every accepted step.
OdeSolution integrate_ode(const Rhs2& rhs, double x0, double y0, double yp0,
                          double x1, double tol = 1e-11);

// Endpoint-only variant advancing (x, y, yp) in place; cheaper inner loop.
void ode_advance(const Rhs2& rhs, double& x, double& y, double& yp, double x1,
                 double tol = 1e-11);

// Damped Newton with finite-difference Jacobian, n in {1, 2}.
using VecFn = std::function<std::vector<double>(const std::vector<double>&)>;
std::vector<double> solve_root(const VecFn& f, std::vector<double> x0,
                               double tol = 1e-12, int max_iter = 200);

}  // namespace ccs::num
