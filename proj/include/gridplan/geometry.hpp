#pragma once

#include <array>
#include <vector>

#include "gridplan/types.hpp"

namespace gridplan {

// Arc-length parameterized guidance polyline. Anchors the Frenet frame: s
// runs along the line, l is the signed lateral offset (left of travel
// positive).
class ReferenceLine {
 public:
  // Throws std::invalid_argument on fewer than 2 points or duplicate
  // consecutive points (spacing < 1e-6 m).
  static ReferenceLine from_polyline(const std::vector<Vec2>& points);

  double length() const { return arc_length_.back(); }
  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& arc_lengths() const { return arc_length_; }

  Vec2 point_at(double s) const;
  Vec2 tangent_at(double s) const;  // unit
  Vec2 normal_at(double s) const;   // unit left normal
  double heading_at(double s) const;
  // Discrete curvature from neighboring segment headings; 0 on a straight.
  double curvature_at(double s) const;

 private:
  // Index of the segment containing arc length s (clamped).
  std::size_t segment_index(double s) const;

  std::vector<Vec2> points_;
  std::vector<double> arc_length_;
  std::vector<double> vertex_curvature_;
};

// Frenet state along a reference line. l_prime / l_pprime are derivatives
// with respect to s, the lattice convention.
struct FrenetState {
  double s{0.0};
  double s_dot{0.0};
  double s_ddot{0.0};
  double l{0.0};
  double l_prime{0.0};
  double l_pprime{0.0};
};

// Nearest-point projection onto the reference line. Fills s and l only;
// ties between segments resolve to the smaller s.
FrenetState project_to_frenet(const Vec2& point, const ReferenceLine& ref);

struct CartesianState {
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double v{0.0};
};

// Inverse of the projection for points inside the line's tubular
// neighborhood. Throws std::out_of_range when s is outside [0, length].
CartesianState frenet_to_cartesian(const FrenetState& fs, const ReferenceLine& ref);

// Bicycle-model path curvature for a steering angle: 2 tan(phi) / wheelbase.
// Throws std::invalid_argument if wheelbase <= 0 or |phi| >= pi/2.
double curvature_from_steering(double phi, double wheelbase);

// Signed circumcircle curvature through three points; 0 when collinear or
// degenerate. Positive for a left turn.
double three_point_curvature(const Vec2& a, const Vec2& b, const Vec2& c);

// Rotates a trajectory into the fixed-oriented frame (Ego-ENU rotated by the
// ego heading about the ego position), and back.
Trajectory to_fixed_oriented(const Trajectory& traj, const EgoState& ego);
Trajectory from_fixed_oriented(const Trajectory& traj, const EgoState& ego);

// Resamples a polyline at roughly `step` spacing, keeping the endpoints.
std::vector<Vec2> resample_polyline(const std::vector<Vec2>& points, double step);

struct OrientedBox {
  Vec2 center;
  double heading{0.0};
  double length{1.0};
  double width{1.0};

  std::array<Vec2, 4> corners() const;
};

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);
bool box_contains(const OrientedBox& box, const Vec2& p);
// Separating-axis test for convex polygons.
bool convex_polygons_overlap(const Polygon& a, const Polygon& b);
bool box_overlaps_polygon(const OrientedBox& box, const Polygon& poly);
Polygon box_to_polygon(const OrientedBox& box);

}  // namespace gridplan
