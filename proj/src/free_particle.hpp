// Free-particle families: sharp-window, Gaussian and bump-window fiducial
// vectors, their coherent states, exact time evolution (closed form via the
// Faddeeva function for the window, complex Gaussian for the Gaussian
// family), stability deviations, energy expectations, action-angle
// inversion and the small-width / large-A limit ladders.
#pragma once

#include <utility>

#include "hilbert.hpp"

namespace ccs::freepart {

using hilbert::PhaseLabel;
using hilbert::PhysicalParams;
using hilbert::StateEvaluator;
using num::cplx;

enum class Family { window, gaussian, bump };

struct WindowFiducialParams {
  double k0, k1;
  double C;  // 1/sqrt(k1-k0)
};
WindowFiducialParams make_window_params(double k0, double k1);

struct GaussianFiducialParams {
  double kbar, A;
  double C_A;  // (2A/pi)^{1/4}
};
GaussianFiducialParams make_gaussian_params(double kbar, double A);

// Flat parameter carrier; the family selects which fields are read.
struct FiducialParams {
  Family family = Family::gaussian;
  double k0 = 0.0, k1 = 0.0;  // window/bump
  double kbar = 0.0, A = 0.0;  // gaussian
};

enum class OrderTag { O_ell, O_Delta, O_invA };

struct StabilityPrediction {
  double leading_phase = 0.0;
  PhaseLabel shifted_label;
  double remainder_norm_sq = 0.0;
  OrderTag order_tag = OrderTag::O_invA;
};

StateEvaluator window_fiducial(double k0, double k1);
StateEvaluator gaussian_fiducial(double kbar, double A);
StateEvaluator bump_fiducial(double k0, double k1);

StateEvaluator fiducial(const FiducialParams& fp);

StateEvaluator coherent_state(const StateEvaluator& fid, const PhaseLabel& label,
                              const PhysicalParams& params);

// Exact evolution of the window coherent state. used_fallback reports
// whether the closed form was replaced by adaptive k-quadrature.
StateEvaluator evolve_window(double k0, double k1, const PhaseLabel& label,
                             double tau, const PhysicalParams& params,
                             bool* used_fallback = nullptr);

// Reference evaluator: same state by adaptive k-quadrature at every x.
StateEvaluator evolve_window_quadrature(double k0, double k1,
                                        const PhaseLabel& label, double tau,
                                        const PhysicalParams& params);

StateEvaluator evolve_gaussian(double kbar, double A, const PhaseLabel& label,
                               double tau, const PhysicalParams& params);

// <state_a|state_b> for two (possibly evolved) coherent states over the same
// fiducial, by momentum-space quadrature (the x-integral transformed via
// Plancherel; removes the oscillatory 1/x^2 tails of the window family).
cplx k_overlap(const FiducialParams& fp, const PhaseLabel& la, double tau_a,
               const PhaseLabel& lb, double tau_b, const PhysicalParams& params);

// measured = 2 - 2|<q+p tau/m, p | evolved>| (phase-minimized deviation);
// predicted carries the closed-form leading-order remainder for the family.
std::pair<double, StabilityPrediction> stability_deviation(
    const FiducialParams& fp, const PhaseLabel& label, double tau,
    double ktilde, const PhysicalParams& params);

double energy_expectation(const FiducialParams& fp, const PhaseLabel& label,
                          const PhysicalParams& params);

PhaseLabel action_invert(const FiducialParams& fp, double J, double omega,
                         const PhysicalParams& params);

struct LimitLadder {
  std::vector<double> rung;        // Delta or A per rung
  std::vector<double> value;       // expectation at the rung
  double extrapolated = 0.0;       // Richardson limit
  double stated_limit = 0.0;       // the commonly quoted limit
  bool discrepancy_flagged = false;
};

// op: 'I' (identity expectation) or 'H' (energy expectation).
LimitLadder limit_expectations(const FiducialParams& fp, const PhaseLabel& label,
                               char op, const PhysicalParams& params);

}  // namespace ccs::freepart
