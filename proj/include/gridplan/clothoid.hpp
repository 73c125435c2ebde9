#pragma once

#include "gridplan/types.hpp"

namespace gridplan {

struct FresnelResult {
  double c{0.0};  // C(xi) = int_0^xi cos(pi u^2 / 2) du
  double s{0.0};  // S(xi) = int_0^xi sin(pi u^2 / 2) du
};

// Fresnel integrals, accurate to ~1e-10 on |xi| <= 8. Power series near the
// origin, adaptive Gauss-Kronrod quadrature elsewhere. Odd in xi.
FresnelResult fresnel(double xi);

// Clothoid through `start` with unit tangent/normal frame (T0, N0) and scale
// a: point(xi) = start + a * [C(xi/a) T0 + S(xi/a) N0]. Curvature along the
// curve is pi * xi / a^2, linear in arc length xi.
struct ClothoidParams {
  Vec2 start;
  Vec2 tangent;  // unit
  Vec2 normal;   // unit, perpendicular to tangent
  double scale{1.0};  // a [m], > 0
};

// Throws std::invalid_argument when the frame is not orthonormal or a <= 0.
Vec2 clothoid_point(const ClothoidParams& params, double xi);

}  // namespace gridplan
