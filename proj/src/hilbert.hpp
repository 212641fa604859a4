// System-independent state machinery: wavefunction evaluators, the
// displacement operator U(q,p) = exp(-iqP/hbar) exp(ipQ/hbar), inner
// products over the real line, label-continuity modulus, and position /
// momentum moments with tail-integrability diagnosis.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "numerics.hpp"

namespace ccs::hilbert {

using num::cplx;

struct PhysicalParams {
  double hbar = 1.0;
  double mass = 1.0;
  double omega = 0.0;
};

void validate(const PhysicalParams& p);

struct PhaseLabel {
  double q = 0.0;
  double p = 0.0;
  double tau = 0.0;
};

struct StateEvaluator {
  std::function<cplx(double)> amplitude;
  std::function<cplx(double)> derivative;  // d/dx of amplitude
  std::vector<double> hints;               // singular/stationary abscissae
};

// Phi(x) = exp(i p (x-q)/hbar) psi(x-q); hints shift by q.
StateEvaluator displace(const StateEvaluator& psi, const PhaseLabel& label,
                        const PhysicalParams& params);

// \int conj(phi) psi dx over the real line.
cplx inner_product(const StateEvaluator& phi, const StateEvaluator& psi,
                   double tol = 1e-10);

double norm(const StateEvaluator& psi, double tol = 1e-10);

// 2 - 2 Re <s1|s2>; both states must be normalized to 1e-6.
double continuity_modulus(const StateEvaluator& s1, const StateEvaluator& s2);

// <Q^order>; DomainError when dyadic tail panels show non-integrability.
double moment_Q(const StateEvaluator& psi, int order, double tol = 1e-10);

// <P> = hbar Im \int conj(psi) psi' dx; <P^2> = hbar^2 \int |psi'|^2 dx.
double moment_P(const StateEvaluator& psi, int order, double hbar,
                double tol = 1e-10);

}  // namespace ccs::hilbert
