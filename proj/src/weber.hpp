// Real parabolic cylinder function W(E,x) solving y'' + (x^2/4 + E) y = 0,
// with the companion constants kappa(E), phi(E), C0(E). Values are produced
// by seeding the large-|x| asymptote (WKB through order 1/x^4) and
// integrating the equation inward; two anchors give an error estimate.
#pragma once

#include <vector>

#include "numerics.hpp"

namespace ccs::weber {

struct EnergyConstants {
  double E = 0.0;
  double kappa = 0.0;  // sqrt(1 + e^{-2 pi E}) - e^{-pi E}
  double phi = 0.0;    // arg Gamma(1/2 - iE), continuous branch
  double C0 = 0.0;     // (2 pi (1 + e^{-2 pi E}))^{-1/2}
};

EnergyConstants energy_constants(double E);

// (2 pi)^{-1/2} (1 + e^{-2 pi E})^{-1/4}; the constant that makes
// psi_E = c0 W(E,.) delta-orthonormal in E.
double orthonormal_c0(double E);

// Smallest x where the truncated asymptote is trusted.
double x_min(double E);

struct ValDer {
  double value = 0.0;
  double derivative = 0.0;
};

// side=+1: W(E,x); side=-1: W(E,-x). x > 0 required; the derivative is
// taken with respect to the positive argument x in both cases.
ValDer asymptotic_W(double E, double x, int side);

struct WeberPoint {
  double value = 0.0;
  double derivative = 0.0;
  double anchor_x = 0.0;
  double est_error = 0.0;
};

// E in [-6, 10], |x| <= 200.
WeberPoint weber_W(double E, double x);

// Batch evaluation on an ascending grid: one inward ODE sweep per sign and
// anchor instead of a fresh integration per point.
std::vector<WeberPoint> weber_sweep(double E, const std::vector<double>& xs);

// Windowed average of x W(E,x)^2 over four oscillation periods centered at
// x_center; tends to kappa(E) in the asymptotic regime.
double envelope_check(double E, double x_center);

}  // namespace ccs::weber
