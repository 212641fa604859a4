#include "weber.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace ccs::weber {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// Anchor floor: the truncated asymptote is ~1e-7 accurate here (1e-6 at
// E=10), which the two-anchor comparison then certifies pointwise.
double anchor_floor(double E) {
  return std::max(40.0, 10.0 + 5.0 * std::abs(E));
}

num::Rhs2 weber_rhs(double E) {
  return [E](double x, double y, double) -> double {
    return -(x * x / 4.0 + E) * y;
  };
}

}  // namespace

EnergyConstants energy_constants(double E) {
  if (!std::isfinite(E)) throw InvalidArgument("energy_constants: E not finite");
  EnergyConstants c;
  c.E = E;
  // kappa = sqrt(1+t) - sqrt(t), t = e^{-2 pi E}; rationalized to avoid the
  // cancellation at E << 0, with an explicit branch past the overflow of t.
  const double u = -2.0 * M_PI * E;
  if (u > 700.0) {
    c.kappa = 0.5 * std::exp(M_PI * E);
    c.C0 = kInvSqrt2Pi * std::exp(M_PI * E);
  } else {
    const double t = std::exp(u);
    c.kappa = 1.0 / (std::sqrt(1.0 + t) + std::exp(-M_PI * E));
    c.C0 = kInvSqrt2Pi / std::sqrt(1.0 + t);
  }
  c.phi = num::log_gamma_complex(num::cplx(0.5, -E)).imag();
  return c;
}

double orthonormal_c0(double E) {
  const double u = -2.0 * M_PI * E;
  if (u > 700.0) return kInvSqrt2Pi * std::exp(0.5 * M_PI * E);
  return kInvSqrt2Pi * std::pow(1.0 + std::exp(u), -0.25);
}

double x_min(double E) { return std::max(12.0, 10.0 + 5.0 * std::abs(E)); }

ValDer asymptotic_W(double E, double x, int side) {
  if (side != 1 && side != -1)
    throw InvalidArgument("asymptotic_W: side must be +1 or -1");
  if (!(x >= x_min(E)))
    throw OutOfAsymptoticRange("asymptotic_W: x below x_min(E)");
  const auto c = energy_constants(E);
  const double x2 = x * x, x4 = x2 * x2;
  // WKB phase of y'' + (x^2/4 + E) y = 0 through order 1/x^4; the constant
  // pi/4 + phi/2 matches the x -> +inf normalization of W.
  const double theta = x2 / 4.0 + E * std::log(x) +
                       (E * E / 2.0 - 3.0 / 8.0) / x2 +
                       (19.0 * E / 8.0 - E * E * E / 2.0) / x4 + M_PI / 4.0 +
                       c.phi / 2.0;
  const double thetap = std::sqrt(x2 / 4.0 + E);
  const double base = (side > 0) ? std::sqrt(2.0 * c.kappa)
                                 : std::sqrt(2.0 / c.kappa);
  const double ampc = 1.0 - 15.0 / (16.0 * x4);
  const double amp = base * std::pow(x2 + 4.0 * E, -0.25) * ampc;
  // d/dx of the amplitude; the 1/x^4 correction's own slope is negligible
  // next to the retained terms but costs nothing to include.
  const double ampp = amp * (-x / (2.0 * (x2 + 4.0 * E)) +
                             (15.0 / 4.0) / (x4 * x) / ampc);
  ValDer r;
  if (side > 0) {
    r.value = amp * std::cos(theta);
    r.derivative = ampp * std::cos(theta) - amp * thetap * std::sin(theta);
  } else {
    r.value = amp * std::sin(theta);
    r.derivative = ampp * std::sin(theta) + amp * thetap * std::cos(theta);
  }
  return r;
}

namespace {

void check_supported(double E, double absx) {
  if (!(E >= -6.0 && E <= 10.0))
    throw OutOfSupportedRange("weber: E outside [-6, 10]");
  if (!(absx <= 200.0)) throw OutOfSupportedRange("weber: |x| > 200");
}

// Seed (y, y') at signed position sx = sgn * anchor from the asymptote.
void seed(double E, double anchor, int sgn, double& y, double& yp) {
  const auto a = asymptotic_W(E, anchor, sgn);
  y = a.value;
  yp = (sgn > 0) ? a.derivative : -a.derivative;  // chain rule for W(E,-u)
}

}  // namespace

WeberPoint weber_W(double E, double x) {
  check_supported(E, std::abs(x));
  const int sgn = (x < 0.0) ? -1 : 1;
  const double a1 = std::max(anchor_floor(E), std::abs(x) + 2.0);
  const double a2 = a1 + 15.0;
  const auto rhs = weber_rhs(E);
  double v[2], d[2];
  const double anchors[2] = {a1, a2};
  for (int i = 0; i < 2; ++i) {
    double cx = sgn * anchors[i], y, yp;
    seed(E, anchors[i], sgn, y, yp);
    num::ode_advance(rhs, cx, y, yp, x, 1e-12);
    v[i] = y;
    d[i] = yp;
  }
  WeberPoint p;
  p.value = v[1];
  p.derivative = d[1];
  p.anchor_x = sgn * a2;
  p.est_error = std::max(std::abs(v[1] - v[0]),
                         std::abs(d[1] - d[0]) / (1.0 + 0.5 * a1));
  return p;
}

std::vector<WeberPoint> weber_sweep(double E, const std::vector<double>& xs) {
  if (xs.empty()) return {};
  for (size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw InvalidArgument("weber_sweep: grid must be strictly ascending");
  check_supported(E, std::max(std::abs(xs.front()), std::abs(xs.back())));
  const auto rhs = weber_rhs(E);
  std::vector<WeberPoint> out(xs.size());

  // One sweep per sign per anchor, visiting targets from the anchor inward.
  for (int sgn : {1, -1}) {
    std::vector<size_t> idx;  // target indices, |x| descending
    for (size_t i = 0; i < xs.size(); ++i)
      if ((sgn > 0 && xs[i] >= 0.0) || (sgn < 0 && xs[i] < 0.0)) idx.push_back(i);
    if (idx.empty()) continue;
    if (sgn > 0) std::reverse(idx.begin(), idx.end());
    const double a1 = std::max(anchor_floor(E), std::abs(xs[idx.front()]) + 2.0);
    const double anchors[2] = {a1, a1 + 15.0};
    for (int pass = 0; pass < 2; ++pass) {
      double cx = sgn * anchors[pass], y, yp;
      seed(E, anchors[pass], sgn, y, yp);
      for (size_t i : idx) {
        num::ode_advance(rhs, cx, y, yp, xs[i], 1e-12);
        if (pass == 0) {
          out[i].value = y;
          out[i].derivative = yp;
        } else {
          out[i].est_error =
              std::max(std::abs(out[i].value - y),
                       std::abs(out[i].derivative - yp) / (1.0 + 0.5 * a1));
          out[i].value = y;
          out[i].derivative = yp;
          out[i].anchor_x = sgn * anchors[pass];
        }
      }
    }
  }
  return out;
}

double envelope_check(double E, double x_center) {
  const double thetap = std::sqrt(x_center * x_center / 4.0 + E);
  const double L = 4.0 * M_PI / thetap;  // four periods across the window
  if (!(x_center - L >= x_min(E)))
    throw OutOfAsymptoticRange("envelope_check: window leaves asymptotic regime");
  const int n = 512;  // Simpson panels; ~128 samples per period
  std::vector<double> xs(n + 1);
  for (int i = 0; i <= n; ++i)
    xs[i] = x_center - L + 2.0 * L * i / n;
  const auto w = weber_sweep(E, xs);
  const double h = 2.0 * L / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double f = xs[i] * w[i].value * w[i].value;
    const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += c * f;
  }
  return (s * h / 3.0) / (2.0 * L);
}

}  // namespace ccs::weber
