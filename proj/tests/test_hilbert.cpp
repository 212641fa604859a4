#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "errors.hpp"
#include "free_particle.hpp"
#include "hilbert.hpp"

using namespace ccs;
using namespace ccs::hilbert;
using doctest::Approx;

namespace {

StateEvaluator unit_gaussian(double center, double sigma) {
  // (pi sigma^2)^{-1/4} exp(-(x-c)^2/(2 sigma^2))
  const double pref = std::pow(M_PI * sigma * sigma, -0.25);
  StateEvaluator s;
  s.amplitude = [pref, center, sigma](double x) -> cplx {
    const double u = x - center;
    return pref * std::exp(-u * u / (2.0 * sigma * sigma));
  };
  s.derivative = [pref, center, sigma](double x) -> cplx {
    const double u = x - center;
    return pref * std::exp(-u * u / (2.0 * sigma * sigma)) *
           (-u / (sigma * sigma));
  };
  s.hints = {center};
  return s;
}

}  // namespace

TEST_CASE("physical params validation") {
  CHECK_THROWS_AS(validate(PhysicalParams{-1.0, 1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(validate(PhysicalParams{1.0, 0.0, 0.0}), InvalidArgument);
  CHECK_NOTHROW(validate(PhysicalParams{}));
}

TEST_CASE("displace: identity at (0,0) and unit-modulus phase") {
  auto psi = unit_gaussian(0.0, 1.0);
  PhysicalParams pp;
  auto same = displace(psi, PhaseLabel{0.0, 0.0, 0.0}, pp);
  for (double x : {-1.3, 0.0, 0.4, 2.2})
    CHECK(std::abs(same.amplitude(x) - psi.amplitude(x)) < 1e-14);

  auto moved = displace(psi, PhaseLabel{0.4, 3.7, 0.0}, pp);
  CHECK(std::abs(moved.amplitude(1.3)) ==
        Approx(std::abs(psi.amplitude(0.9))).epsilon(1e-12));
}

TEST_CASE("displace: unitarity over random labels") {
  auto psi = unit_gaussian(0.0, 1.0);
  PhysicalParams pp;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    auto s = displace(psi, PhaseLabel{u(rng), u(rng), 0.0}, pp);
    CHECK(norm(s) == Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("displace: derivative consistency by central differences") {
  auto psi = unit_gaussian(0.3, 0.8);
  PhysicalParams pp;
  auto s = displace(psi, PhaseLabel{1.1, -2.0, 0.0}, pp);
  const double h = 1e-6;
  for (double x : {-2.0, -0.5, 0.7, 1.9, 3.1}) {
    const cplx fd = (s.amplitude(x + h) - s.amplitude(x - h)) / (2.0 * h);
    CHECK(std::abs(fd - s.derivative(x)) < 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("inner_product: Gaussian overlaps") {
  auto g0 = unit_gaussian(0.0, 1.0);
  CHECK(std::abs(inner_product(g0, g0) - 1.0) < 1e-9);

  // e^{-x^2/4}-profile unit Gaussians offset by d=2 -> e^{-d^2/8}
  auto ga = unit_gaussian(0.0, std::sqrt(2.0));
  auto gb = unit_gaussian(2.0, std::sqrt(2.0));
  CHECK(inner_product(ga, gb).real() ==
        Approx(std::exp(-0.5)).epsilon(1e-9));

  // even vs odd
  StateEvaluator odd;
  odd.amplitude = [](double x) -> cplx {
    return x * std::exp(-x * x / 2.0);
  };
  odd.derivative = [](double x) -> cplx {
    return (1.0 - x * x) * std::exp(-x * x / 2.0);
  };
  odd.hints = {0.0};
  CHECK(std::abs(inner_product(g0, odd)) < 1e-10);
}

TEST_CASE("inner_product: conjugate symmetry on complex superpositions") {
  PhysicalParams pp;
  auto a = displace(unit_gaussian(0.0, 1.0), PhaseLabel{0.5, 1.7, 0.0}, pp);
  auto b = displace(unit_gaussian(0.3, 1.4), PhaseLabel{-0.8, 0.9, 0.0}, pp);
  const cplx ab = inner_product(a, b);
  const cplx ba = inner_product(b, a);
  CHECK(std::abs(ab - std::conj(ba)) < 1e-10);
}

TEST_CASE("continuity_modulus: limits and monotone decrease") {
  PhysicalParams pp;
  auto g = unit_gaussian(0.0, 1.0);
  CHECK(continuity_modulus(g, g) == Approx(0.0).epsilon(1e-9));

  // orthogonal pair -> 2
  StateEvaluator odd;
  const double pref = std::pow(M_PI, -0.25) * std::sqrt(2.0);
  odd.amplitude = [pref](double x) -> cplx {
    return pref * x * std::exp(-x * x / 2.0);
  };
  odd.derivative = [pref](double x) -> cplx {
    return pref * (1.0 - x * x) * std::exp(-x * x / 2.0);
  };
  odd.hints = {0.0};
  CHECK(continuity_modulus(g, odd) == Approx(2.0).epsilon(1e-8));

  double prev = 10.0;
  for (double d : {0.4, 0.2, 0.1}) {
    auto gd = displace(g, PhaseLabel{d, 0.0, 0.0}, pp);
    const double m = continuity_modulus(g, gd);
    CHECK(m < prev);
    prev = m;
  }
  CHECK(prev < 0.05);

  auto not_unit = unit_gaussian(0.0, 1.0);
  auto amp = not_unit.amplitude;
  not_unit.amplitude = [amp](double x) { return 1.01 * amp(x); };
  CHECK_THROWS_AS(continuity_modulus(g, not_unit), NotNormalized);
}

TEST_CASE("moments of free Gaussian coherent states") {
  PhysicalParams pp;  // hbar = m = 1
  const double kbar = 1.3, A = 2.0, q = 0.7, p = -0.4;
  auto st = displace(freepart::gaussian_fiducial(kbar, A),
                     PhaseLabel{q, p, 0.0}, pp);
  CHECK(moment_Q(st, 1) == Approx(q).epsilon(1e-9));
  CHECK(moment_Q(st, 2) == Approx(A + q * q).epsilon(1e-9));
  CHECK(moment_P(st, 1, pp.hbar) == Approx(pp.hbar * kbar + p).epsilon(1e-9));
  CHECK(moment_P(st, 2, pp.hbar) ==
        Approx(std::pow(pp.hbar * kbar + p, 2) +
               pp.hbar * pp.hbar / (4.0 * A))
            .epsilon(1e-9));
}

TEST_CASE("uncertainty saturation for the Gaussian family") {
  PhysicalParams pp;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> ua(0.5, 5.0);
  for (int i = 0; i < 20; ++i) {
    const double kbar = u(rng), A = ua(rng), q = u(rng), p = u(rng);
    auto st = displace(freepart::gaussian_fiducial(kbar, A),
                       PhaseLabel{q, p, 0.0}, pp);
    const double q1 = moment_Q(st, 1), q2 = moment_Q(st, 2);
    const double p1 = moment_P(st, 1, pp.hbar), p2 = moment_P(st, 2, pp.hbar);
    const double dq = std::sqrt(q2 - q1 * q1), dp = std::sqrt(p2 - p1 * p1);
    CHECK(dq * dp - pp.hbar / 2.0 >= -1e-9);
    CHECK(dq * dp == Approx(pp.hbar / 2.0).epsilon(1e-8));
  }
}

TEST_CASE("window family lies outside dom(Q): DomainError") {
  auto w = freepart::window_fiducial(0.0, 2.0);
  CHECK_THROWS_AS(moment_Q(w, 2), DomainError);
  CHECK_THROWS_AS(moment_Q(w, 1), DomainError);
  // P-moments exist: <P> = C^2 hbar (k1^2-k0^2)/2 = 1. The oscillatory
  // 1/x^2 tail limits the generic x-space quadrature to ~1e-6 here.
  CHECK(moment_P(w, 1, 1.0) == Approx(1.0).epsilon(2e-5));
}
