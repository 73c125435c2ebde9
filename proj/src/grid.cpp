#include "gridplan/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridplan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared distance transform (Felzenszwalb & Huttenlocher).
void squared_dt_1d(const std::vector<double>& f, std::vector<double>* out,
                   std::vector<int>* v, std::vector<double>* z) {
  const int n = static_cast<int>(f.size());
  v->assign(n, 0);
  z->assign(n + 1, 0.0);
  int k = 0;
  (*v)[0] = 0;
  (*z)[0] = -kInf;
  (*z)[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const int p = (*v)[k];
      s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * q - 2.0 * p);
      if (s <= (*z)[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    (*v)[k] = q;
    (*z)[k] = s;
    (*z)[k + 1] = kInf;
  }
  k = 0;
  out->resize(n);
  for (int q = 0; q < n; ++q) {
    while ((*z)[k + 1] < q) ++k;
    const int p = (*v)[k];
    (*out)[q] = (q - p) * (q - p) + f[p];
  }
}

}  // namespace

GridGeometry GridGeometry::centered(const Vec2& center, double extent, double resolution) {
  if (!(extent > 0.0) || !(resolution > 0.0)) {
    throw std::invalid_argument("grid extent and resolution must be > 0");
  }
  GridGeometry g;
  g.resolution = resolution;
  g.rows = static_cast<int>(std::lround(extent / resolution));
  g.cols = g.rows;
  // Cell (0,0) center sits at the south-west corner cell.
  const double half = 0.5 * (g.rows - 1) * resolution;
  g.origin = {center.x - half, center.y - half};
  return g;
}

std::optional<std::pair<int, int>> GridGeometry::world_to_cell(const Vec2& p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw std::invalid_argument("world_to_cell: non-finite point");
  }
  const int col = static_cast<int>(std::lround((p.x - origin.x) / resolution));
  const int row = static_cast<int>(std::lround((p.y - origin.y) / resolution));
  if (!contains(row, col)) return std::nullopt;
  return std::make_pair(row, col);
}

Vec2 GridGeometry::cell_to_world(int row, int col) const {
  return {origin.x + col * resolution, origin.y + row * resolution};
}

void ScalarField::update_boundary_to_max() {
  float m = 0.0f;
  for (float v : data) m = std::max(m, v);
  boundary_value = m;
}

void SpaceTimeField::update_boundary_to_max() {
  float m = 0.0f;
  for (float v : data) m = std::max(m, v);
  boundary_value = m;
}

std::vector<double> euclidean_distance_field(const GridGeometry& geom,
                                             const std::vector<std::uint8_t>& marked) {
  const int rows = geom.rows;
  const int cols = geom.cols;
  std::vector<double> dist2(geom.cell_count());
  for (std::size_t i = 0; i < dist2.size(); ++i) {
    dist2[i] = marked[i] ? 0.0 : kInf;
  }
  std::vector<double> line;
  std::vector<double> out;
  std::vector<int> v;
  std::vector<double> z;
  // Columns first.
  line.resize(rows);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) line[r] = dist2[static_cast<std::size_t>(r) * cols + c];
    squared_dt_1d(line, &out, &v, &z);
    for (int r = 0; r < rows; ++r) dist2[static_cast<std::size_t>(r) * cols + c] = out[r];
  }
  // Then rows.
  line.resize(cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) line[c] = dist2[static_cast<std::size_t>(r) * cols + c];
    squared_dt_1d(line, &out, &v, &z);
    for (int c = 0; c < cols; ++c) dist2[static_cast<std::size_t>(r) * cols + c] = out[c];
  }
  for (double& d : dist2) {
    d = std::isinf(d) ? kInf : std::sqrt(d) * geom.resolution;
  }
  return dist2;
}

ScalarField occupancy_cost_field(const OccupancyGrid& occ, double inflation) {
  if (inflation < 0.0) throw std::invalid_argument("inflation must be >= 0");
  ScalarField field = ScalarField::zeros(occ.geom);
  if (inflation == 0.0) {
    for (std::size_t i = 0; i < occ.labels.size(); ++i) {
      field.data[i] = occ.labels[i] != CellLabel::kFree ? 1.0f : 0.0f;
    }
  } else {
    std::vector<std::uint8_t> marked(occ.labels.size());
    bool any = false;
    for (std::size_t i = 0; i < occ.labels.size(); ++i) {
      marked[i] = occ.labels[i] != CellLabel::kFree ? 1 : 0;
      any = any || marked[i];
    }
    if (any) {
      const std::vector<double> dist = euclidean_distance_field(occ.geom, marked);
      for (std::size_t i = 0; i < dist.size(); ++i) {
        field.data[i] = static_cast<float>(std::max(0.0, 1.0 - dist[i] / inflation));
      }
    }
  }
  field.update_boundary_to_max();
  return field;
}

}  // namespace gridplan
