#include "gridplan/clothoid.hpp"

#include <cmath>
#include <stdexcept>

namespace gridplan {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFrameTolerance = 1e-9;

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr double kKronrodNodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813,
};
constexpr double kKronrodWeights[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529,
};
constexpr double kGaussWeights[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870,
};

struct QuadResult {
  double value;
  double error;
};

template <typename F>
QuadResult gauss_kronrod(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double kronrod = kKronrodWeights[0] * f0;
  double gauss = kGaussWeights[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double off = half * kKronrodNodes[i];
    const double sum = f(mid - off) + f(mid + off);
    kronrod += kKronrodWeights[i] * sum;
    if (i % 2 == 0) gauss += kGaussWeights[i / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

template <typename F>
double adaptive_quadrature(const F& f, double a, double b, double tol, int depth = 0) {
  const QuadResult q = gauss_kronrod(f, a, b);
  if (q.error <= tol || depth >= 30) return q.value;
  const double mid = 0.5 * (a + b);
  return adaptive_quadrature(f, a, mid, 0.5 * tol, depth + 1) +
         adaptive_quadrature(f, mid, b, 0.5 * tol, depth + 1);
}

// Maclaurin series, converges fast for |x| <= 1.
//   C: sum (-1)^n h^(2n)   x^(4n+1) / ((2n)!   (4n+1))
//   S: sum (-1)^n h^(2n+1) x^(4n+3) / ((2n+1)! (4n+3))
FresnelResult fresnel_series(double x) {
  const double h = 0.5 * kPi;
  const double x4 = x * x * x * x;
  double c = 0.0;
  double s = 0.0;
  double term_c = x;              // (-1)^n h^(2n) x^(4n+1) / (2n)!
  double term_s = h * x * x * x;  // (-1)^n h^(2n+1) x^(4n+3) / (2n+1)!
  for (int n = 0; n < 24; ++n) {
    c += term_c / (4.0 * n + 1.0);
    s += term_s / (4.0 * n + 3.0);
    term_c *= -h * h * x4 / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
    term_s *= -h * h * x4 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
    if (std::abs(term_c) < 1e-18 && std::abs(term_s) < 1e-18) break;
  }
  return {c, s};
}

}  // namespace

FresnelResult fresnel(double xi) {
  if (!std::isfinite(xi)) throw std::invalid_argument("fresnel: xi must be finite");
  const double sign = xi < 0.0 ? -1.0 : 1.0;
  const double x = std::abs(xi);
  FresnelResult r;
  if (x <= 1.0) {
    r = fresnel_series(x);
  } else {
    const FresnelResult base = fresnel_series(1.0);
    const auto cos_term = [](double u) { return std::cos(0.5 * kPi * u * u); };
    const auto sin_term = [](double u) { return std::sin(0.5 * kPi * u * u); };
    r.c = base.c + adaptive_quadrature(cos_term, 1.0, x, 1e-13);
    r.s = base.s + adaptive_quadrature(sin_term, 1.0, x, 1e-13);
  }
  return {sign * r.c, sign * r.s};
}

Vec2 clothoid_point(const ClothoidParams& params, double xi) {
  if (!(params.scale > 0.0)) throw std::invalid_argument("clothoid: scale must be > 0");
  if (std::abs(params.tangent.norm() - 1.0) > kFrameTolerance ||
      std::abs(params.normal.norm() - 1.0) > kFrameTolerance) {
    throw std::invalid_argument("clothoid: tangent/normal must be unit vectors");
  }
  if (std::abs(params.tangent.dot(params.normal)) > kFrameTolerance) {
    throw std::invalid_argument("clothoid: tangent and normal must be perpendicular");
  }
  const FresnelResult f = fresnel(xi / params.scale);
  return params.start + params.scale * (f.c * params.tangent + f.s * params.normal);
}

}  // namespace gridplan
