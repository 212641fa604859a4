#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "errors.hpp"
#include "free_particle.hpp"

using namespace ccs;
using namespace ccs::freepart;
using doctest::Approx;
using hilbert::PhaseLabel;
using hilbert::PhysicalParams;

TEST_CASE("window fiducial: normalization constant and x=0 branch") {
  CHECK_THROWS_AS(window_fiducial(2.0, 2.0), InvalidArgument);
  auto wp = make_window_params(0.0, 2.0);
  CHECK(wp.C == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(wp.C * wp.C * (wp.k1 - wp.k0) == Approx(1.0).epsilon(1e-15));

  auto w = window_fiducial(0.0, 2.0);
  CHECK(std::abs(w.amplitude(0.0)) ==
        Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-12));
  // series branch continuous across its switch point
  const double xs = 1e-4 / 2.0;
  CHECK(std::abs(w.amplitude(xs * (1.0 - 1e-9)) -
                 w.amplitude(xs * (1.0 + 1e-9))) < 1e-12);
  // x-space norm (oscillatory 1/x^2 tail limits the generic quadrature)
  CHECK(hilbert::norm(w, 1e-6) == Approx(1.0).epsilon(5e-6));
  // momentum-space norm is clean to machine precision
  FiducialParams fw;
  fw.family = Family::window;
  fw.k0 = 0.0;
  fw.k1 = 2.0;
  PhysicalParams pp;
  PhaseLabel l0{};
  CHECK(std::abs(k_overlap(fw, l0, 0.0, l0, 0.0, pp)) ==
        Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gaussian fiducial: normalization and peak") {
  auto gp = make_gaussian_params(0.0, M_PI / 2.0);
  CHECK(gp.C_A == Approx(1.0).epsilon(1e-15));

  auto g = gaussian_fiducial(1.0, 10.0);
  CHECK(hilbert::norm(g) == Approx(1.0).epsilon(1e-10));
  CHECK(std::norm(g.amplitude(0.0)) ==
        Approx(1.0 / std::sqrt(2.0 * M_PI * 10.0)).epsilon(1e-12));
}

TEST_CASE("bump fiducial: normalization, smoothness, symmetry") {
  auto b = bump_fiducial(-1.0, 1.0);
  CHECK(hilbert::norm(b, 1e-8) == Approx(1.0).epsilon(1e-6));
  // |Psi(x)| even for a symmetric window
  for (double x : {0.3, 1.1, 2.7}) {
    CHECK(std::abs(b.amplitude(x)) ==
          Approx(std::abs(b.amplitude(-x))).epsilon(1e-8));
  }
  // derivative consistent with finite differences (weight is C-infinity)
  const double h = 1e-5;
  for (double x : {-1.2, 0.4, 2.0}) {
    const auto fd = (b.amplitude(x + h) - b.amplitude(x - h)) / (2.0 * h);
    CHECK(std::abs(fd - b.derivative(x)) < 1e-6);
  }
}

TEST_CASE("coherent states: unitarity for both closed-form families") {
  PhysicalParams pp;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    PhaseLabel l{u(rng), u(rng), 0.0};
    auto cg = coherent_state(gaussian_fiducial(1.0, 3.0), l, pp);
    CHECK(hilbert::norm(cg) == Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("evolve_window: tau=0 equals the coherent state") {
  PhysicalParams pp;
  PhaseLabel l{0.4, 0.8, 0.0};
  auto ev = evolve_window(0.0, 1.0, l, 0.0, pp);
  auto cs = coherent_state(window_fiducial(0.0, 1.0), l, pp);
  for (double x : {-3.0, -1.2, -0.4, 0.0, 0.3, 0.7, 1.4, 2.5, 4.0, 7.7}) {
    CHECK(std::abs(ev.amplitude(x) - cs.amplitude(x)) < 1e-12);
  }
}

TEST_CASE("evolve_window: closed form vs adaptive k-quadrature") {
  PhysicalParams pp;
  PhaseLabel l{0.0, 0.0, 0.0};
  auto ev = evolve_window(0.0, 1.0, l, 0.3, pp);
  auto evq = evolve_window_quadrature(0.0, 1.0, l, 0.3, pp);
  CHECK(std::abs(ev.amplitude(0.7) - evq.amplitude(0.7)) < 1e-8);

  // 5x5 (x, tau) probe grid
  for (double tau : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    auto e1 = evolve_window(0.0, 1.0, l, tau, pp);
    auto e2 = evolve_window_quadrature(0.0, 1.0, l, tau, pp);
    for (double x : {-4.0, -1.0, 0.2, 1.3, 6.0}) {
      CHECK(std::abs(e1.amplitude(x) - e2.amplitude(x)) < 1e-8);
      CHECK(std::abs(e1.derivative(x) - e2.derivative(x)) < 1e-7);
    }
  }
}

TEST_CASE("evolve_window: norm preserved at tau=2") {
  PhysicalParams pp;
  PhaseLabel l{0.0, 0.5, 0.0};
  auto ev = evolve_window(0.0, 1.0, l, 2.0, pp);
  CHECK(hilbert::norm(ev, 1e-6) == Approx(1.0).epsilon(1e-5));
  FiducialParams fw;
  fw.family = Family::window;
  fw.k0 = 0.0;
  fw.k1 = 1.0;
  CHECK(std::abs(k_overlap(fw, l, 2.0, l, 2.0, pp)) ==
        Approx(1.0).epsilon(1e-10));
}

TEST_CASE("evolve_gaussian: tau=0, Ehrenfest centroid and spreading") {
  PhysicalParams pp;  // hbar = m = 1
  PhaseLabel l0{0.0, 0.0, 0.0};
  auto ev0 = evolve_gaussian(1.0, 10.0, l0, 0.0, pp);
  auto cs = coherent_state(gaussian_fiducial(1.0, 10.0), l0, pp);
  for (double x : {-2.0, 0.0, 1.5}) {
    CHECK(std::abs(ev0.amplitude(x) - cs.amplitude(x)) < 1e-12);
  }

  auto ev = evolve_gaussian(1.0, 10.0, l0, 2.0, pp);
  CHECK(hilbert::norm(ev) == Approx(1.0).epsilon(1e-9));
  CHECK(hilbert::moment_Q(ev, 1) == Approx(2.0).epsilon(1e-9));
  const double var =
      hilbert::moment_Q(ev, 2) - std::pow(hilbert::moment_Q(ev, 1), 2);
  CHECK(var == Approx(10.1).epsilon(1e-8));
}

TEST_CASE("stability: Gaussian predicted carries the stated closed form") {
  PhysicalParams pp;
  FiducialParams fp;
  fp.family = Family::gaussian;
  fp.kbar = 2.0;
  fp.A = 100.0;
  auto [measured, pred] =
      stability_deviation(fp, PhaseLabel{0.0, 0.0, 0.0}, 1.0, fp.kbar, pp);
  CHECK(pred.remainder_norm_sq == Approx(0.04).epsilon(1e-12));
  // exact overlap: |M| = sqrt(2A/|2A+ia|) exp(-2A kbar^2 a^2/(4A^2+a^2))
  const double a = 0.5;
  const double mod = std::sqrt(2.0 * fp.A / std::hypot(2.0 * fp.A, a)) *
                     std::exp(-2.0 * fp.A * 4.0 * a * a /
                              (4.0 * fp.A * fp.A + a * a));
  CHECK(measured == Approx(2.0 - 2.0 * mod).epsilon(1e-9));
  CHECK(pred.shifted_label.q == Approx(0.0));
}

TEST_CASE("stability: x-space overlap quadrature agrees with k-space") {
  PhysicalParams pp;
  FiducialParams fp;
  fp.family = Family::gaussian;
  fp.kbar = 1.0;
  fp.A = 25.0;
  const double tau = 1.0;
  PhaseLabel l{0.3, 0.7, 0.0};
  auto [measured, pred] = stability_deviation(fp, l, tau, fp.kbar, pp);
  auto evolved = evolve_gaussian(fp.kbar, fp.A, l, tau, pp);
  auto shifted = coherent_state(gaussian_fiducial(fp.kbar, fp.A),
                                pred.shifted_label, pp);
  const double ov = std::abs(hilbert::inner_product(shifted, evolved));
  CHECK(measured == Approx(2.0 - 2.0 * ov).epsilon(1e-7));
}

TEST_CASE("stability: Gaussian kbar=0 deviation decreases in A") {
  PhysicalParams pp;
  double prev = 1.0;
  for (double A : {100.0, 1000.0, 10000.0}) {
    FiducialParams fp;
    fp.family = Family::gaussian;
    fp.kbar = 0.0;
    fp.A = A;
    auto [m, pred] = stability_deviation(fp, PhaseLabel{}, 1.0, 0.0, pp);
    CHECK(pred.remainder_norm_sq == 0.0);
    CHECK(m < prev);
    prev = m;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("stability: window ell=0 deviation is O(Delta)") {
  PhysicalParams pp;
  const double kbar = 1.0;
  for (double Delta : {0.4, 0.2, 0.1}) {
    FiducialParams fp;
    fp.family = Family::window;
    fp.k0 = kbar - Delta;
    fp.k1 = kbar + Delta;
    auto [m, pred] = stability_deviation(fp, PhaseLabel{}, 1.0, kbar, pp);
    CHECK(pred.order_tag == OrderTag::O_Delta);
    CHECK(m / Delta < 1.0);  // bounded ratio
    // leading order: measured tracks the phase variance prediction
    CHECK(m == Approx(pred.remainder_norm_sq).epsilon(0.1));
  }
}

TEST_CASE("stability: leading phase cancels at p^2 = hbar^2 ktilde^2") {
  PhysicalParams pp;
  FiducialParams fp;
  fp.family = Family::gaussian;
  fp.kbar = 1.5;
  fp.A = 50.0;
  auto [m, pred] = stability_deviation(fp, PhaseLabel{0.0, pp.hbar * 1.5, 0.0},
                                       2.0, 1.5, pp);
  CHECK(std::abs(pred.leading_phase) < 1e-12);
}

TEST_CASE("energy expectation: closed forms and quadrature cross-check") {
  PhysicalParams pp;
  pp.mass = 0.5;  // 2m = 1
  FiducialParams w;
  w.family = Family::window;
  w.k0 = 0.0;
  w.k1 = 1.0;
  CHECK(energy_expectation(w, PhaseLabel{}, pp) == Approx(1.0 / 3.0).epsilon(1e-13));

  // <H> = (<P^2> + 2p<P> + p^2)/2m via x-space quadrature
  PhysicalParams pp1;
  FiducialParams g;
  g.family = Family::gaussian;
  g.kbar = 1.2;
  g.A = 4.0;
  PhaseLabel l{0.5, -0.7, 0.0};
  auto st = coherent_state(gaussian_fiducial(g.kbar, g.A), l, pp1);
  const double hq = hilbert::moment_P(st, 2, pp1.hbar) / (2.0 * pp1.mass);
  CHECK(energy_expectation(g, l, pp1) == Approx(hq).epsilon(1e-8));

  // Gaussian A-trend toward (hbar kbar + p)^2 / 2m
  double prev_gap = 1e9;
  for (double A : {10.0, 100.0, 1000.0}) {
    FiducialParams fg = g;
    fg.A = A;
    const double gap = energy_expectation(fg, l, pp1) -
                       std::pow(pp1.hbar * g.kbar + l.p, 2) / (2.0 * pp1.mass);
    CHECK(gap > 0.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }

  // window k1 -> k0 trend at fixed kbar
  double prev = 1e9;
  for (double Delta : {0.4, 0.2, 0.1}) {
    FiducialParams fw;
    fw.family = Family::window;
    fw.k0 = 1.2 - Delta;
    fw.k1 = 1.2 + Delta;
    const double gap = energy_expectation(fw, l, pp1) -
                       std::pow(pp1.hbar * 1.2 + l.p, 2) / (2.0 * pp1.mass);
    CHECK(gap > 0.0);
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("action_invert: closed-form cases and round trips") {
  PhysicalParams pp;
  pp.mass = 0.5;
  FiducialParams w;
  w.family = Family::window;
  w.k0 = 0.0;
  w.k1 = 1.0;
  auto l = action_invert(w, 1.0 / 3.0, 1.0, pp);
  CHECK(l.p == Approx(0.0).epsilon(1e-14));
  CHECK(l.q == Approx(0.0).epsilon(1e-14));
  CHECK(energy_expectation(w, l, pp) == Approx(1.0 / 3.0).epsilon(1e-12));

  FiducialParams g;
  g.family = Family::gaussian;
  g.kbar = 0.0;
  g.A = 2.0;
  auto lg = action_invert(g, 1.0 / (4.0 * g.A), 1.0, pp);
  CHECK(std::abs(lg.p) < 1e-12);

  // generic round trip
  FiducialParams g2;
  g2.family = Family::gaussian;
  g2.kbar = 0.8;
  g2.A = 5.0;
  const double omega = 0.9, J = 2.0;
  auto l2 = action_invert(g2, J, omega, pp);
  CHECK(energy_expectation(g2, l2, pp) == Approx(omega * J).epsilon(1e-10));
  CHECK(l2.q == Approx(l2.p / std::tan(omega)).epsilon(1e-12));

  CHECK_THROWS_AS(action_invert(g2, 1e-6, 1.0, pp), BelowGroundAction);
}

TEST_CASE("limit ladders") {
  PhysicalParams pp;
  FiducialParams g;
  g.family = Family::gaussian;
  g.kbar = 1.0;
  g.A = 10.0;
  auto li = limit_expectations(g, PhaseLabel{}, 'I', pp);
  for (double v : li.value) CHECK(v == 1.0);

  auto lh = limit_expectations(g, PhaseLabel{}, 'H', pp);
  CHECK(lh.extrapolated == Approx(0.5).epsilon(1e-10));
  CHECK_FALSE(lh.discrepancy_flagged);

  FiducialParams w;
  w.family = Family::window;
  w.k0 = 0.6;
  w.k1 = 1.4;  // kbar = 1
  auto lw = limit_expectations(w, PhaseLabel{}, 'H', pp);
  CHECK(lw.extrapolated == Approx(0.5).epsilon(1e-10));
  CHECK(lw.stated_limit == Approx(0.0));
  CHECK(lw.discrepancy_flagged);  // stated p^2/2m differs from the ladder
}
