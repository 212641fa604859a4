#include "numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

#include "errors.hpp"

namespace ccs::num {

namespace {

// G7K15 abscissae/weights (positive half; Kronrod node 0 included).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel eval_panel(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  cplx kron(0.0, 0.0), gauss(0.0, 0.0);
  for (int i = 0; i < 8; ++i) {
    cplx fsum;
    if (i == 7) {
      fsum = f(c);
    } else {
      fsum = f(c - h * kXgk[i]) + f(c + h * kXgk[i]);
    }
    if (!std::isfinite(fsum.real()) || !std::isfinite(fsum.imag()))
      throw NonFinite("integrand returned a non-finite value");
    kron += kWgk[i] * fsum;
    if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
  }
  kron *= h;
  gauss *= h;
  return Panel{a, b, kron, std::abs(kron - gauss)};
}

QuadResult adaptive_core(const Integrand& f, const std::vector<double>& pts,
                         double tol, long max_evals) {
  std::priority_queue<Panel> heap;
  cplx total(0.0, 0.0);
  double err = 0.0;
  long evals = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    Panel p = eval_panel(f, pts[i], pts[i + 1]);
    evals += 15;
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  while (err > tol && evals + 30 <= max_evals && !heap.empty()) {
    Panel worst = heap.top();
    heap.pop();
    total -= worst.value;
    err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted
      total += worst.value;
      err += worst.error;
      break;
    }
    for (const auto& half : {eval_panel(f, worst.a, mid), eval_panel(f, mid, worst.b)}) {
      total += half.value;
      err += half.error;
      heap.push(half);
    }
    evals += 30;
  }
  QuadResult r;
  r.value = total;
  r.error_estimate = err;
  r.evaluations = evals;
  r.converged = (err <= tol);
  return r;
}

}  // namespace

QuadResult integrate_adaptive(const Integrand& f, double a, double b,
                              double tol, long max_evals) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw InvalidArgument("integrate_adaptive: need finite a < b");
  if (!(tol > 0)) throw InvalidArgument("integrate_adaptive: tol must be > 0");
  return adaptive_core(f, {a, b}, tol, max_evals);
}

QuadResult integrate_line(const Integrand& f, double tol,
                          const std::vector<double>& hints, long max_evals) {
  // x = t/(1-t^2), dx = (1+t^2)/(1-t^2)^2 dt, t in (-1,1)
  auto mapped = [&f](double t) -> cplx {
    const double om = 1.0 - t * t;
    if (om <= 1e-280) return cplx(0.0, 0.0);
    const double x = t / om;
    const double jac = (1.0 + t * t) / (om * om);
    return f(x) * jac;
  };
  std::vector<double> pts{-1.0, 1.0};
  for (double h : hints) {
    if (!std::isfinite(h)) continue;
    double t = (h == 0.0) ? 0.0
                          : (std::sqrt(1.0 + 4.0 * h * h) - 1.0) / (2.0 * h);
    if (t > -1.0 && t < 1.0) pts.push_back(t);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return adaptive_core(mapped, pts, tol, max_evals);
}

QuadResult integrate_gaussian_weight(const Integrand& g, double center,
                                     double A, double tol) {
  if (!(A > 0)) throw InvalidArgument("integrate_gaussian_weight: A must be > 0");
  const double half_width = 8.5 / std::sqrt(A);
  auto f = [&](double e) -> cplx {
    const double d = e - center;
    return std::exp(-A * d * d) * g(e);
  };
  return integrate_adaptive(f, center - half_width, center + half_width, tol);
}

HermiteRule hermite_rule(int n) {
  if (n < 1 || n > 512) throw InvalidArgument("hermite_rule: n out of range");
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  if (n % 2 == 1) rule.nodes[m - 1] = 0.0;
  // ascending order
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

namespace {

// Weideman rational approximation coefficients, built once.
constexpr int kFadN = 64;

struct FadTable {
  double L;
  std::array<double, kFadN> a;  // a[k] multiplies Z^k
  FadTable() {
    const int M = kFadN, M2 = 2 * kFadN;
    L = std::sqrt(kFadN / std::sqrt(2.0));
    std::vector<double> F(M2, 0.0);
    for (int j = 1; j < M2; ++j) {
      const int k = j - M;  // -M+1 .. M-1
      const double theta = k * M_PI / M;
      const double t = L * std::tan(0.5 * theta);
      F[j] = std::exp(-t * t) * (L * L + t * t);
    }
    // fftshift then DFT, real part
    std::vector<double> G(M2);
    for (int i = 0; i < M2; ++i) G[i] = F[(i + M) % M2];
    for (int n = 1; n <= kFadN; ++n) {
      double re = 0.0;
      for (int m = 0; m < M2; ++m)
        re += G[m] * std::cos(2.0 * M_PI * n * m / M2);
      a[n - 1] = re / M2;  // a[n-1] multiplies Z^{n-1}
    }
  }
};

const FadTable& fad_table() {
  static const FadTable t;
  return t;
}

cplx faddeeva_upper(cplx z) {
  const FadTable& T = fad_table();
  const cplx iz(-z.imag(), z.real());
  const cplx d = T.L - iz;
  const cplx Z = (T.L + iz) / d;
  cplx p(0.0, 0.0);
  for (int k = kFadN - 1; k >= 0; --k) p = p * Z + T.a[k];
  return 2.0 * p / (d * d) + (1.0 / std::sqrt(M_PI)) / d;
}

}  // namespace

cplx faddeeva(cplx z) {
  if (z.imag() >= 0.0) return faddeeva_upper(z);
  return 2.0 * std::exp(-z * z) - faddeeva_upper(-z);
}

cplx log_gamma_complex(cplx z) {
  static const double g = 4.7421875;  // 607/128
  static const double c[15] = {
      0.99999999999999709182,     57.156235665862923517,
      -59.597960355475491248,     14.136097974741747174,
      -0.49191381609762019978,    0.33994649984811888699e-4,
      0.46523628927048575665e-4,  -0.98374475304879564677e-4,
      0.15808870322491248884e-3,  -0.21026444172410488319e-3,
      0.21743961811521264320e-3,  -0.16431810653676389022e-3,
      0.84418223983852743293e-4,  -0.26190838401581408670e-4,
      0.36899182659531622704e-5};
  if (std::abs(z.imag()) < 1e-13) {
    const double zr = z.real();
    if (zr <= 0.0 && std::abs(zr - std::round(zr)) < 1e-13)
      throw PoleError("log_gamma_complex: pole at non-positive integer");
  }
  if (z.real() < 0.5) {
    // reflection: log Gamma(z) = log(pi / sin(pi z)) - log Gamma(1 - z)
    return std::log(M_PI) - std::log(std::sin(M_PI * z)) -
           log_gamma_complex(1.0 - z);
  }
  cplx sum = c[0];
  for (int k = 1; k < 15; ++k) sum += c[k] / (z - 1.0 + static_cast<double>(k));
  const cplx t = z + g - 0.5;
  return 0.5 * std::log(2.0 * M_PI) + (z - 0.5) * std::log(t) - t +
         std::log(sum);
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 35.0 / 384 - 5179.0 / 57600,
                 kE3 = 500.0 / 1113 - 7571.0 / 16695,
                 kE4 = 125.0 / 192 - 393.0 / 640,
                 kE5 = -2187.0 / 6784 + 92097.0 / 339200,
                 kE6 = 11.0 / 84 - 187.0 / 2100, kE7 = -1.0 / 40;
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;

struct State2 {
  double y, v;
};

template <typename Rhs, typename OnStep>
void dopri_drive(const Rhs& rhs, double x0, double y0, double yp0, double x1,
                 double tol, const OnStep& on_step) {
  if (x0 == x1) return;
  const double dir = (x1 > x0) ? 1.0 : -1.0;
  const double span = std::abs(x1 - x0);
  double x = x0, y = y0, v = yp0;
  double h = dir * std::min(1e-2, span / 10.0);
  double f1y = v, f1v = rhs(x, y, v);
  int guard = 0;
  while (dir * (x1 - x) > 0.0) {
    if (++guard > 40000000)
      throw NonConvergence("integrate_ode: step budget exhausted");
    if (dir * (x + h) > dir * x1) h = x1 - x;
    if (std::abs(h) < 1e-14 * (1.0 + std::abs(x)))
      throw StepUnderflow("integrate_ode: step size underflow");
    const double k1y = f1y, k1v = f1v;
    double ty = y + h * kA21 * k1y, tv = v + h * kA21 * k1v;
    const double k2y = tv, k2v = rhs(x + kC2 * h, ty, tv);
    ty = y + h * (kA31 * k1y + kA32 * k2y);
    tv = v + h * (kA31 * k1v + kA32 * k2v);
    const double k3y = tv, k3v = rhs(x + kC3 * h, ty, tv);
    ty = y + h * (kA41 * k1y + kA42 * k2y + kA43 * k3y);
    tv = v + h * (kA41 * k1v + kA42 * k2v + kA43 * k3v);
    const double k4y = tv, k4v = rhs(x + kC4 * h, ty, tv);
    ty = y + h * (kA51 * k1y + kA52 * k2y + kA53 * k3y + kA54 * k4y);
    tv = v + h * (kA51 * k1v + kA52 * k2v + kA53 * k3v + kA54 * k4v);
    const double k5y = tv, k5v = rhs(x + kC5 * h, ty, tv);
    ty = y + h * (kA61 * k1y + kA62 * k2y + kA63 * k3y + kA64 * k4y + kA65 * k5y);
    tv = v + h * (kA61 * k1v + kA62 * k2v + kA63 * k3v + kA64 * k4v + kA65 * k5v);
    const double k6y = tv, k6v = rhs(x + h, ty, tv);
    const double ny = y + h * (kB1 * k1y + kB3 * k3y + kB4 * k4y + kB5 * k5y + kB6 * k6y);
    const double nv = v + h * (kB1 * k1v + kB3 * k3v + kB4 * k4v + kB5 * k5v + kB6 * k6v);
    const double k7y = nv, k7v = rhs(x + h, ny, nv);
    const double ey =
        h * (kE1 * k1y + kE3 * k3y + kE4 * k4y + kE5 * k5y + kE6 * k6y + kE7 * k7y);
    const double ev =
        h * (kE1 * k1v + kE3 * k3v + kE4 * k4v + kE5 * k5v + kE6 * k6v + kE7 * k7v);
    const double sy = tol * (1.0 + std::abs(y) + std::abs(ny));
    const double sv = tol * (1.0 + std::abs(v) + std::abs(nv));
    const double en = std::sqrt(0.5 * ((ey / sy) * (ey / sy) + (ev / sv) * (ev / sv)));
    if (en <= 1.0) {
      x += h;
      y = ny;
      v = nv;
      f1y = k7y;  // FSAL
      f1v = k7v;
      on_step(x, y, v, std::hypot(ey, ev));
    }
    const double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
    h *= fac;
  }
  on_step(x1, y, v, -1.0);  // sentinel for "final state"; consumed by callers
}

}  // namespace

OdeSolution integrate_ode(const Rhs2& rhs, double x0, double y0, double yp0,
                          double x1, double tol) {
  if (!(tol > 0)) throw InvalidArgument("integrate_ode: tol must be > 0");
  OdeSolution sol;
  sol.x.push_back(x0);
  sol.y.push_back(y0);
  sol.yp.push_back(yp0);
  sol.local_error.push_back(0.0);
  double lx = x0, ly = y0, lv = yp0;
  dopri_drive(rhs, x0, y0, yp0, x1, tol,
              [&](double x, double y, double v, double le) {
                if (le < 0.0) {
                  lx = x; ly = y; lv = v;
                  return;
                }
                sol.x.push_back(x);
                sol.y.push_back(y);
                sol.yp.push_back(v);
                sol.local_error.push_back(le);
              });
  if (sol.x.back() != lx) {
    sol.x.push_back(lx);
    sol.y.push_back(ly);
    sol.yp.push_back(lv);
    sol.local_error.push_back(0.0);
  } else {
    sol.y.back() = ly;
    sol.yp.back() = lv;
  }
  for (double v : sol.y)
    if (!std::isfinite(v)) throw NonFinite("integrate_ode: non-finite value");
  return sol;
}

void ode_advance(const Rhs2& rhs, double& x, double& y, double& yp, double x1,
                 double tol) {
  double fx = x, fy = y, fv = yp;
  dopri_drive(rhs, x, y, yp, x1, tol, [&](double xx, double yy, double vv, double le) {
    if (le < 0.0) {
      fx = xx; fy = yy; fv = vv;
    }
  });
  x = fx;
  y = fy;
  yp = fv;
}

std::vector<double> solve_root(const VecFn& f, std::vector<double> x, double tol,
                               int max_iter) {
  const size_t n = x.size();
  if (n < 1 || n > 2) throw InvalidArgument("solve_root: n must be 1 or 2");
  auto norm_inf = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };
  std::vector<double> fx = f(x);
  if (fx.size() != n) throw InvalidArgument("solve_root: dimension mismatch");
  for (int it = 0; it < max_iter; ++it) {
    if (norm_inf(fx) <= tol) return x;
    // finite-difference Jacobian
    double J[2][2] = {{0, 0}, {0, 0}};
    for (size_t j = 0; j < n; ++j) {
      const double h = 1e-7 * (1.0 + std::abs(x[j]));
      std::vector<double> xp = x;
      xp[j] += h;
      std::vector<double> fp = f(xp);
      for (size_t i = 0; i < n; ++i) J[i][j] = (fp[i] - fx[i]) / h;
    }
    std::vector<double> dx(n, 0.0);
    if (n == 1) {
      if (J[0][0] == 0.0) throw NonConvergence("solve_root: singular Jacobian");
      dx[0] = -fx[0] / J[0][0];
    } else {
      const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      if (det == 0.0) throw NonConvergence("solve_root: singular Jacobian");
      dx[0] = (-fx[0] * J[1][1] + fx[1] * J[0][1]) / det;
      dx[1] = (-fx[1] * J[0][0] + fx[0] * J[1][0]) / det;
    }
    double lambda = 1.0;
    const double f0 = norm_inf(fx);
    for (int bt = 0; bt < 50; ++bt) {
      std::vector<double> xn = x;
      for (size_t i = 0; i < n; ++i) xn[i] += lambda * dx[i];
      std::vector<double> fn = f(xn);
      if (norm_inf(fn) < f0 || lambda < 1e-12) {
        x = xn;
        fx = fn;
        break;
      }
      lambda *= 0.5;
    }
  }
  if (norm_inf(fx) <= tol) return x;
  throw NonConvergence("solve_root: no convergence");
}

}  // namespace ccs::num
