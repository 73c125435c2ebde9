#include "gridplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridplan {

namespace {

constexpr double kMinSpacing = 1e-6;
constexpr double kHalfPi = 1.57079632679489661923;

}  // namespace

double three_point_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a;
  const Vec2 ac = c - a;
  const Vec2 bc = c - b;
  const double cross = ab.cross(ac);
  const double denom = ab.norm() * ac.norm() * bc.norm();
  if (denom < 1e-12) return 0.0;
  return 2.0 * cross / denom;
}

ReferenceLine ReferenceLine::from_polyline(const std::vector<Vec2>& points) {
  if (points.size() < 2) {
    throw std::invalid_argument("reference line needs at least 2 points");
  }
  ReferenceLine ref;
  ref.points_ = points;
  ref.arc_length_.resize(points.size());
  ref.arc_length_[0] = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = (points[i] - points[i - 1]).norm();
    if (d < kMinSpacing) {
      throw std::invalid_argument("reference line has duplicate consecutive points");
    }
    ref.arc_length_[i] = ref.arc_length_[i - 1] + d;
  }
  ref.vertex_curvature_.assign(points.size(), 0.0);
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    ref.vertex_curvature_[i] = three_point_curvature(points[i - 1], points[i], points[i + 1]);
  }
  if (points.size() > 2) {
    ref.vertex_curvature_.front() = ref.vertex_curvature_[1];
    ref.vertex_curvature_.back() = ref.vertex_curvature_[points.size() - 2];
  }
  // Smooth the discrete estimates over a short arc-length window; raw
  // three-point curvature is a step function at geometry transitions and
  // that aliases into the speed composition downstream.
  constexpr double kSmoothWindow = 1.5;  // [m]
  std::vector<double> smoothed(ref.vertex_curvature_.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t j = i;; --j) {
      if (ref.arc_length_[i] - ref.arc_length_[j] > kSmoothWindow) break;
      sum += ref.vertex_curvature_[j];
      ++count;
      if (j == 0) break;
    }
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (ref.arc_length_[j] - ref.arc_length_[i] > kSmoothWindow) break;
      sum += ref.vertex_curvature_[j];
      ++count;
    }
    smoothed[i] = sum / count;
  }
  ref.vertex_curvature_ = std::move(smoothed);
  return ref;
}

std::size_t ReferenceLine::segment_index(double s) const {
  if (s <= 0.0) return 0;
  if (s >= arc_length_.back()) return points_.size() - 2;
  const auto it = std::upper_bound(arc_length_.begin(), arc_length_.end(), s);
  return static_cast<std::size_t>(it - arc_length_.begin()) - 1;
}

Vec2 ReferenceLine::point_at(double s) const {
  const std::size_t i = segment_index(s);
  const double seg_len = arc_length_[i + 1] - arc_length_[i];
  const double u = (s - arc_length_[i]) / seg_len;
  return points_[i] + (points_[i + 1] - points_[i]) * u;
}

Vec2 ReferenceLine::tangent_at(double s) const {
  const std::size_t i = segment_index(s);
  return (points_[i + 1] - points_[i]).normalized();
}

Vec2 ReferenceLine::normal_at(double s) const {
  const Vec2 t = tangent_at(s);
  return {-t.y, t.x};
}

double ReferenceLine::heading_at(double s) const {
  const Vec2 t = tangent_at(s);
  return std::atan2(t.y, t.x);
}

double ReferenceLine::curvature_at(double s) const {
  const std::size_t i = segment_index(s);
  const double seg_len = arc_length_[i + 1] - arc_length_[i];
  const double u = (s - arc_length_[i]) / seg_len;
  return (1.0 - u) * vertex_curvature_[i] + u * vertex_curvature_[i + 1];
}

FrenetState project_to_frenet(const Vec2& point, const ReferenceLine& ref) {
  const auto& pts = ref.points();
  const auto& arcs = ref.arc_lengths();
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double best_l = 0.0;
  // Global scan over segments; ties go to the smaller s.
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 ab = pts[i + 1] - a;
    const double len2 = ab.squared_norm();
    double u = (point - a).dot(ab) / len2;
    u = std::clamp(u, 0.0, 1.0);
    const Vec2 foot = a + ab * u;
    const double d2 = (point - foot).squared_norm();
    if (d2 < best_d2 - 1e-15) {
      best_d2 = d2;
      const double seg_len = arcs[i + 1] - arcs[i];
      best_s = arcs[i] + u * seg_len;
      const Vec2 tangent = ab.normalized();
      best_l = tangent.cross(point - foot);
    }
  }
  FrenetState fs;
  fs.s = best_s;
  fs.l = best_l;
  return fs;
}

CartesianState frenet_to_cartesian(const FrenetState& fs, const ReferenceLine& ref) {
  if (fs.s < -1e-9 || fs.s > ref.length() + 1e-9) {
    throw std::out_of_range("frenet_to_cartesian: s outside reference line");
  }
  const double s = std::clamp(fs.s, 0.0, ref.length());
  const Vec2 base = ref.point_at(s);
  const Vec2 normal = ref.normal_at(s);
  const double kappa = ref.curvature_at(s);
  const double one_kl = std::max(0.1, 1.0 - kappa * fs.l);
  CartesianState out;
  const Vec2 p = base + normal * fs.l;
  out.x = p.x;
  out.y = p.y;
  out.heading = wrap_angle(ref.heading_at(s) + std::atan2(fs.l_prime, one_kl));
  out.v = fs.s_dot * std::sqrt(one_kl * one_kl + fs.l_prime * fs.l_prime);
  return out;
}

double curvature_from_steering(double phi, double wheelbase) {
  if (!(wheelbase > 0.0)) throw std::invalid_argument("wheelbase must be > 0");
  if (!(std::abs(phi) < kHalfPi)) throw std::invalid_argument("|phi| must be < pi/2");
  return 2.0 * std::tan(phi) / wheelbase;
}

namespace {

Trajectory rotate_about_ego(const Trajectory& traj, const EgoState& ego, double angle) {
  Trajectory out = traj;
  const Vec2 origin = ego.position();
  auto rotate = [&](Waypoint& wp) {
    const Vec2 p = (Vec2{wp.x, wp.y} - origin).rotated(angle) + origin;
    wp.x = p.x;
    wp.y = p.y;
    wp.heading = wrap_angle(wp.heading + angle);
  };
  rotate(out.start);
  for (Waypoint& wp : out.waypoints) rotate(wp);
  return out;
}

}  // namespace

Trajectory to_fixed_oriented(const Trajectory& traj, const EgoState& ego) {
  return rotate_about_ego(traj, ego, -ego.heading);
}

Trajectory from_fixed_oriented(const Trajectory& traj, const EgoState& ego) {
  return rotate_about_ego(traj, ego, ego.heading);
}

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& points, double step) {
  if (points.size() < 2 || !(step > 0.0)) return points;
  std::vector<Vec2> out;
  out.push_back(points.front());
  double carried = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2 a = points[i];
    const Vec2 b = points[i + 1];
    const double seg = (b - a).norm();
    if (seg < 1e-12) continue;
    const Vec2 dir = (b - a) * (1.0 / seg);
    double d = step - carried;
    while (d < seg) {
      out.push_back(a + dir * d);
      d += step;
    }
    carried = seg - (d - step);
  }
  if ((out.back() - points.back()).norm() > 1e-9) {
    out.push_back(points.back());
  }
  return out;
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 fwd = Vec2{std::cos(heading), std::sin(heading)} * (0.5 * length);
  const Vec2 left = Vec2{-std::sin(heading), std::cos(heading)} * (0.5 * width);
  return {center + fwd + left, center - fwd + left, center - fwd - left, center + fwd - left};
}

Polygon box_to_polygon(const OrientedBox& box) {
  const auto c = box.corners();
  return {c[0], c[1], c[2], c[3]};
}

bool box_contains(const OrientedBox& box, const Vec2& p) {
  const Vec2 d = (p - box.center).rotated(-box.heading);
  return std::abs(d.x) <= 0.5 * box.length && std::abs(d.y) <= 0.5 * box.width;
}

namespace {

bool separated_by_edge_normals(const Polygon& a, const Polygon& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Vec2 edge = a[(i + 1) % a.size()] - a[i];
    const Vec2 axis{-edge.y, edge.x};
    double amin = std::numeric_limits<double>::infinity();
    double amax = -amin;
    for (const Vec2& p : a) {
      const double d = axis.dot(p);
      amin = std::min(amin, d);
      amax = std::max(amax, d);
    }
    double bmin = std::numeric_limits<double>::infinity();
    double bmax = -bmin;
    for (const Vec2& p : b) {
      const double d = axis.dot(p);
      bmin = std::min(bmin, d);
      bmax = std::max(bmax, d);
    }
    if (amax < bmin || bmax < amin) return true;
  }
  return false;
}

}  // namespace

bool convex_polygons_overlap(const Polygon& a, const Polygon& b) {
  if (a.size() < 3 || b.size() < 3) return false;
  return !separated_by_edge_normals(a, b) && !separated_by_edge_normals(b, a);
}

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  return convex_polygons_overlap(box_to_polygon(a), box_to_polygon(b));
}

bool box_overlaps_polygon(const OrientedBox& box, const Polygon& poly) {
  return convex_polygons_overlap(box_to_polygon(box), poly);
}

}  // namespace gridplan
