#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "gridplan/types.hpp"

namespace gridplan {

enum class CellLabel : std::uint8_t { kFree = 0, kStatic = 1, kMovable = 2 };

// Axis-aligned cell lattice in Ego-ENU. `origin` is the world position of
// cell (0, 0)'s center; row indexes north (+y), column indexes east (+x).
struct GridGeometry {
  Vec2 origin;
  double resolution{kDefaultResolution};
  int rows{0};
  int cols{0};

  static GridGeometry centered(const Vec2& center, double extent, double resolution);

  std::size_t cell_count() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
  bool contains(int row, int col) const {
    return row >= 0 && row < rows && col >= 0 && col < cols;
  }
  // Nearest cell for a world point; nullopt when out of bounds. Throws
  // std::invalid_argument on non-finite input.
  std::optional<std::pair<int, int>> world_to_cell(const Vec2& p) const;
  Vec2 cell_to_world(int row, int col) const;

  bool operator==(const GridGeometry& o) const {
    return origin == o.origin && resolution == o.resolution && rows == o.rows && cols == o.cols;
  }
};

struct OccupancyGrid {
  GridGeometry geom;
  std::vector<CellLabel> labels;  // row-major

  static OccupancyGrid empty(const GridGeometry& geom) {
    return {geom, std::vector<CellLabel>(geom.cell_count(), CellLabel::kFree)};
  }
  CellLabel at(int row, int col) const {
    return labels[static_cast<std::size_t>(row) * geom.cols + col];
  }
  void set(int row, int col, CellLabel label) {
    labels[static_cast<std::size_t>(row) * geom.cols + col] = label;
  }
  bool occupied(int row, int col) const { return at(row, col) != CellLabel::kFree; }
};

// 2D scalar field over a grid; float storage, double math.
struct ScalarField {
  GridGeometry geom;
  std::vector<float> data;
  float boundary_value{0.0f};  // returned for out-of-extent samples

  static ScalarField zeros(const GridGeometry& geom) {
    return {geom, std::vector<float>(geom.cell_count(), 0.0f), 0.0f};
  }
  double at(int row, int col) const {
    return data[static_cast<std::size_t>(row) * geom.cols + col];
  }
  void set(int row, int col, double value) {
    data[static_cast<std::size_t>(row) * geom.cols + col] = static_cast<float>(value);
  }
  void update_boundary_to_max();
};

// Scalar field per planning timestep (t = 0.1 .. steps * 0.1 s).
struct SpaceTimeField {
  GridGeometry geom;
  int steps{0};
  std::vector<float> data;  // t-major, then row-major
  float boundary_value{0.0f};

  static SpaceTimeField zeros(const GridGeometry& geom, int steps) {
    return {geom, steps,
            std::vector<float>(static_cast<std::size_t>(steps) * geom.cell_count(), 0.0f), 0.0f};
  }
  std::size_t index(int t, int row, int col) const {
    return (static_cast<std::size_t>(t) * geom.rows + row) * geom.cols + col;
  }
  double at(int t, int row, int col) const { return data[index(t, row, col)]; }
  void set(int t, int row, int col, double value) {
    data[index(t, row, col)] = static_cast<float>(value);
  }
  void update_boundary_to_max();
};

// Per-timestep occupancy probability in [0, 1].
using PredictionGrid = SpaceTimeField;
// Per-timestep traversal cost.
using CostVolume = SpaceTimeField;

// Exact Euclidean distance (in meters, between cell centers) from every cell
// to the nearest marked cell. Unmarked grids give +inf everywhere.
std::vector<double> euclidean_distance_field(const GridGeometry& geom,
                                             const std::vector<std::uint8_t>& marked);

// Per-cell cost in [0, 1]: occupied cells cost 1, decaying linearly to 0
// over `inflation` meters of clearance.
ScalarField occupancy_cost_field(const OccupancyGrid& occ, double inflation);

}  // namespace gridplan
