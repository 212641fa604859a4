#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "errors.hpp"
#include "iho.hpp"

using namespace ccs;
using namespace ccs::iho;
using doctest::Approx;

TEST_CASE("make_iho_params: box and constant") {
  const auto p = make_iho_params(1.0, 2.0);
  CHECK(p.C_A == Approx(std::pow(4.0 / M_PI, 0.25)).epsilon(1e-14));
  CHECK_THROWS_AS(make_iho_params(7.0, 2.0), OutOfSupportedRange);
  CHECK_THROWS_AS(make_iho_params(-3.0, 2.0), OutOfSupportedRange);
  CHECK_THROWS_AS(make_iho_params(1.0, 0.5), OutOfSupportedRange);
  CHECK_THROWS_AS(make_iho_params(1.0, 200.0), OutOfSupportedRange);
}

TEST_CASE("fiducial: frozen pointwise reference values at (1, 2)") {
  // 30-digit reference evaluations of C_A int e^{-A(E-Ebar)^2} c0(E) W(E,x) dE
  const auto psi = iho_fiducial(1.0, 2.0);
  struct Row {
    double x, v;
  };
  const Row rows[] = {
      {0.7, 0.07919334716942136},
      {5.3, -0.1759685945231873},
      {-3.1, -0.3230396722950037},
      {17.0, 0.03192005727612719},
  };
  for (const auto& r : rows) {
    const auto v = psi.amplitude(r.x);
    CHECK(v.real() == Approx(r.v).epsilon(2e-6));
    CHECK(std::abs(v.imag()) < 1e-12);
  }
}

TEST_CASE("fiducial: c0 placement inside vs outside the E-integral") {
  const auto in = iho_fiducial(0.0, 1.0, C0Placement::inside);
  const auto out = iho_fiducial(0.0, 1.0, C0Placement::outside);
  CHECK(in.amplitude(0.7).real() == Approx(0.2012276751065336).epsilon(2e-6));
  CHECK(out.amplitude(0.7).real() == Approx(0.2057984496817207).epsilon(2e-6));
}

TEST_CASE("fiducial: evaluator is continuous across the table edge") {
  const auto psi = iho_fiducial(1.0, 5.0);
  // the state oscillates on a scale 4 pi / x here, so compare the slowly
  // varying WKB envelope sqrt(v^2 + (v'/theta')^2) across the edge instead
  // of pointwise values
  auto env = [&](double x) {
    const double th = 0.5 * std::abs(x);
    const double v = psi.amplitude(x).real();
    const double g = psi.derivative(x).real();
    return std::sqrt(v * v + (g / th) * (g / th));
  };
  for (double x : {69.9, -69.9}) {
    const double a = env(x);
    const double b = env(x > 0 ? 70.2 : -70.2);
    CHECK(std::abs(a - b) < 5e-3 * (a + b));
  }
  // derivative consistent with a finite difference of the amplitude
  const double h = 1e-5;
  const auto d = psi.derivative(1.3);
  const auto fd = (psi.amplitude(1.3 + h) - psi.amplitude(1.3 - h)) / (2.0 * h);
  CHECK(std::abs(d - fd) < 1e-5 * (1.0 + std::abs(d)));
}

TEST_CASE("norm: x-space norm is 1 across the parameter box") {
  for (double Ebar : {0.0, 1.0, 3.0}) {
    for (double A : {5.0, 10.0, 50.0}) {
      const double n = iho_norm(Ebar, A, {0.0, 0.0, 0.0});
      CAPTURE(Ebar);
      CAPTURE(A);
      CHECK(n == Approx(1.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("norm: displaced and evolved states stay normalized") {
  CHECK(iho_norm(1.0, 10.0, {0.4, 0.3, 0.0}) == Approx(1.0).epsilon(1e-4));
  CHECK(iho_norm(1.0, 10.0, {0.4, 0.3, 0.5}) == Approx(1.0).epsilon(1e-4));
  CHECK(iho_norm(1.0, 10.0, {0.0, 0.0, 2.0}) == Approx(1.0).epsilon(1e-4));
}

TEST_CASE("coherent: label box and evolution-time box enforced") {
  CHECK_THROWS_AS(iho_coherent(1.0, 5.0, {9.0, 0.0, 0.0}),
                  OutOfSupportedRange);
  CHECK_THROWS_AS(iho_coherent(1.0, 5.0, {0.0, 9.0, 0.0}),
                  OutOfSupportedRange);
  CHECK_THROWS_AS(iho_coherent(1.0, 5.0, {0.0, 0.0, 4.0}),
                  OutOfSupportedRange);
  // hyperbolic flow can push a legal label out of the box
  CHECK_THROWS_AS(iho_coherent(1.0, 5.0, {5.0, 5.0, 2.0}),
                  OutOfSupportedRange);
}

TEST_CASE("temporal stability: closed remainder equals its quadrature") {
  for (double A : {5.0, 25.0, 100.0}) {
    for (double t : {0.0, 0.5, 2.0}) {
      const auto [closed, quad] = stability_remainder(1.0, A, t);
      CHECK(closed == Approx(t * t / (4.0 * A)).epsilon(1e-14));
      CHECK(std::abs(closed - quad) < 1e-10);
    }
  }
}

TEST_CASE("temporal stability: x-space deviation matches e^{-t^2/8A}") {
  const double A = 25.0;
  for (double t : {0.5, 1.0, 2.0}) {
    const double dev = stability_deviation_x(1.0, A, t);
    const double exact = 2.0 - 2.0 * std::exp(-t * t / (8.0 * A));
    CHECK(std::abs(dev - exact) < 1e-5);
    // the small-t closed remainder t^2/4A is good to ~10% out to t ~ 2
    CHECK(dev == Approx(t * t / (4.0 * A)).epsilon(0.1));
  }
  // float-precision tables floor the t = 0 self-overlap near 1e-7
  CHECK(std::abs(stability_deviation_x(1.0, A, 0.0)) < 1e-6);
}

TEST_CASE("re-labeling: evolving |q,p,0> by t equals the label (q,p,t)") {
  double err = 0.0;
  const cplx o =
      iho_overlap(1.0, 10.0, {0.4, 0.3, 0.0}, 1.0, {0.4, 0.3, 1.0}, 0.0, &err);
  CHECK(std::abs(o) == Approx(1.0).epsilon(1e-4));
  CHECK(std::abs(o - cplx(1.0, 0.0)) < 1e-4);
}

TEST_CASE("label continuity: overlap deficit is small and monotone in dq") {
  const double A = 1.0;
  auto deficit = [&](double dq) {
    const cplx o =
        iho_overlap(1.0, A, {0.0, 0.0, 0.0}, 0.0, {dq, 0.0, 0.0}, 0.0);
    return 2.0 - 2.0 * std::abs(o);
  };
  const double d1 = deficit(1e-3), d2 = deficit(2e-3);
  CHECK(d1 > 0.0);
  CHECK(d1 < 1e-2);
  CHECK(d2 > d1);
  // quadratic scaling in the label perturbation
  CHECK(d2 / d1 == Approx(4.0).epsilon(0.1));
}

TEST_CASE("moments: <P> vanishes on the real fiducial") {
  CHECK(std::abs(iho_moment_P1(1.0, 10.0)) < 1e-10);
}

TEST_CASE("moments: first Q moment agrees with the continuum-tail route") {
  for (auto [Ebar, A] : {std::pair{1.0, 2.0}, std::pair{1.0, 10.0}}) {
    const double disc = iho_moment_Q(Ebar, A, 1);
    const double cont = iho_moment_Q1_continuum(Ebar, A);
    CAPTURE(Ebar);
    CAPTURE(A);
    CHECK(disc == Approx(cont).epsilon(1e-3));
  }
  // <Q> is exponentially small in A: the kappa vs 1/kappa tail asymmetry
  // enters through e^{-pi E}, whose phase rotates at the Gaussian saddle and
  // suppresses the integrated difference like e^{-pi^2 A / 8}. The per-side
  // tails are huge (~e^{A/2}) yet nearly cancel; both routes must see it.
  const double k2a = iho_moment_Q(1.0, 2.0, 1);
  const double k2b = iho_moment_Q(1.0, 10.0, 1);
  CHECK(k2a < 0.0);  // heavier 2/kappa envelope on the minus side
  CHECK(std::abs(k2a) < 0.1);
  CHECK(std::abs(k2b) < 1e-3 * std::abs(k2a));
}

TEST_CASE("moments: second moment and reach guards") {
  const double q1 = iho_moment_Q(1.0, 4.0, 1);
  const double q2 = iho_moment_Q(1.0, 4.0, 2);
  CHECK(q2 > 0.0);
  CHECK(q2 > q1 * q1);  // variance positivity
  CHECK_THROWS_AS(iho_moment_Q(1.0, 25.0, 2), NonConvergence);
  CHECK_THROWS_AS(iho_moment_Q(1.0, 50.0, 1), NonConvergence);
  CHECK_THROWS_AS(iho_moment_Q(1.0, 10.0, 3), InvalidArgument);
}

TEST_CASE("energy: x-space <H> on the fiducial is Ebar") {
  for (auto [Ebar, A] : {std::pair{1.0, 10.0}, std::pair{0.0, 5.0},
                         std::pair{3.0, 10.0}}) {
    CAPTURE(Ebar);
    CAPTURE(A);
    CHECK(iho_energy_x(Ebar, A, {0.0, 0.0, 0.0}) ==
          Approx(Ebar).epsilon(1e-4));
  }
}

TEST_CASE("energy: <H> is conserved under evolution of a displaced state") {
  const double e0 = iho_energy_x(1.0, 10.0, {0.4, 0.3, 0.0});
  const double e1 = iho_energy_x(1.0, 10.0, {0.4, 0.3, 1.0});
  const double e2 = iho_energy_x(1.0, 10.0, {0.4, 0.3, 2.0});
  // closed form from the tail-aware primitives at tau = 0
  const double K2 = iho_moment_Q(1.0, 10.0, 1);
  const double closed =
      1.0 - 0.5 * 0.4 * K2 + 0.3 * 0.3 - 0.25 * 0.4 * 0.4;
  CHECK(e0 == Approx(closed).epsilon(1e-6));
  CHECK(std::abs(e1 - e0) < 1e-3);
  CHECK(std::abs(e2 - e0) < 1e-3);
}

TEST_CASE("action system: omega = pi/2 reduces to p^2 = omega J - Ebar") {
  const double J = 2.0, w = 0.5 * M_PI;
  const auto sys = action_system_solve(1.0, 10.0, J, w);
  CHECK(std::abs(sys.K1) < 1e-10);
  CHECK(sys.solution.q == Approx(0.0).epsilon(1e-10));
  CHECK(sys.solution.p == Approx(std::sqrt(w * J - 1.0)).epsilon(1e-10));
  CHECK(std::abs(sys.residual1) < 1e-8);
  CHECK(std::abs(sys.residual2) < 1e-8);
}

TEST_CASE("action system: oblique omega solves both equations") {
  const double J = 3.0, w = M_PI / 3.0;
  const auto sys = action_system_solve(1.0, 10.0, J, w);
  CHECK(std::abs(sys.residual1) < 1e-8);
  CHECK(std::abs(sys.residual2) < 1e-8);
  CHECK(sys.solution.q ==
        Approx(sys.solution.p / std::tan(w)).epsilon(1e-10));
  // quadrature verification: <H> on the solved label reproduces omega J
  const double e = iho_energy_x(1.0, 10.0, sys.solution);
  CHECK(e == Approx(w * J).epsilon(1e-3));
}

TEST_CASE("action system: unattainable action and bad omega") {
  CHECK_THROWS_AS(action_system_solve(1.0, 10.0, 0.0, 0.5 * M_PI),
                  NonConvergence);
  CHECK_THROWS_AS(action_system_solve(1.0, 10.0, 2.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(action_system_solve(1.0, 10.0, 2.0, 3.14), InvalidArgument);
}
