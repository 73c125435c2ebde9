#include "gridplan/bev_raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gridplan/geometry.hpp"

namespace gridplan {

namespace {

void blend_max(std::vector<float>* channel, const GridGeometry& geom, int row, int col,
               float intensity) {
  if (!geom.contains(row, col)) return;
  float& cell = (*channel)[static_cast<std::size_t>(row) * geom.cols + col];
  cell = std::max(cell, intensity);
}

OrientedBox agent_box(const AgentState& state, double length, double width) {
  return {state.position(), state.heading, length, width};
}

// Thin rectangle around a polyline segment, for stop lines.
Polygon segment_box(const Vec2& a, const Vec2& b, double half_width) {
  const Vec2 dir = (b - a).normalized();
  const Vec2 n{-dir.y * half_width, dir.x * half_width};
  return {a + n, b + n, b - n, a - n};
}

}  // namespace

BevRaster BevRaster::zeros(const GridGeometry& geom) {
  BevRaster r;
  r.geom = geom;
  for (auto& ch : r.channels) ch.assign(geom.cell_count(), 0.0f);
  return r;
}

bool fill_polygon(std::vector<float>* channel, const GridGeometry& geom, const Polygon& poly,
                  float intensity) {
  if (poly.size() < 3) return false;
  double min_y = poly[0].y;
  double max_y = poly[0].y;
  for (const Vec2& p : poly) {
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int row_lo = std::max(0, static_cast<int>(std::ceil((min_y - geom.origin.y) / geom.resolution)));
  const int row_hi =
      std::min(geom.rows - 1, static_cast<int>(std::floor((max_y - geom.origin.y) / geom.resolution)));
  bool touched = false;
  std::vector<double> xs;
  for (int row = row_lo; row <= row_hi; ++row) {
    const double y = geom.origin.y + row * geom.resolution;
    xs.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2& a = poly[i];
      const Vec2& b = poly[(i + 1) % poly.size()];
      // Half-open rule so shared vertices are counted once.
      if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y)) {
        const double t = (y - a.y) / (b.y - a.y);
        xs.push_back(a.x + t * (b.x - a.x));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const int col_lo =
          std::max(0, static_cast<int>(std::ceil((xs[i] - geom.origin.x) / geom.resolution)));
      const int col_hi = std::min(
          geom.cols - 1, static_cast<int>(std::floor((xs[i + 1] - geom.origin.x) / geom.resolution)));
      for (int col = col_lo; col <= col_hi; ++col) {
        blend_max(channel, geom, row, col, intensity);
        touched = true;
      }
    }
  }
  return touched;
}

void draw_polyline(std::vector<float>* channel, const GridGeometry& geom,
                   const std::vector<Vec2>& points, float intensity) {
  const double step = 0.5 * geom.resolution;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vec2 a = points[i];
    const Vec2 b = points[i + 1];
    const double len = (b - a).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int k = 0; k <= n; ++k) {
      const Vec2 p = a + (b - a) * (static_cast<double>(k) / n);
      const int col = static_cast<int>(std::lround((p.x - geom.origin.x) / geom.resolution));
      const int row = static_cast<int>(std::lround((p.y - geom.origin.y) / geom.resolution));
      blend_max(channel, geom, row, col, intensity);
    }
  }
}

namespace {

void fill_checked(std::vector<float>* channel, const GridGeometry& geom, const Polygon& poly,
                  float intensity, bool strict, const char* what) {
  const bool touched = fill_polygon(channel, geom, poly, intensity);
  if (!touched && strict) {
    // Only complain when the polygon truly lies outside the raster, not
    // when it is degenerate or thinner than a cell.
    for (const Vec2& p : poly) {
      if (p.x >= geom.origin.x && p.y >= geom.origin.y &&
          p.x <= geom.origin.x + (geom.cols - 1) * geom.resolution &&
          p.y <= geom.origin.y + (geom.rows - 1) * geom.resolution) {
        return;
      }
    }
    throw std::runtime_error(std::string("rasterize_scene: ") + what +
                             " polygon lies outside the raster extent");
  }
}

float history_brightness(int age_steps, double alpha) {
  return static_cast<float>(std::max(0.0, 1.0 - age_steps * alpha));
}

}  // namespace

BevRaster rasterize_scene(const SceneFrame& frame, const GridGeometry& geom,
                          const RasterOptions& options) {
  BevRaster raster = BevRaster::zeros(geom);

  auto* landmarks_ch = &raster.channel(RasterChannel::kLandmarks);
  auto* agents_ch = &raster.channel(RasterChannel::kAgents);
  auto* ego_ch = &raster.channel(RasterChannel::kEgo);
  auto* static_ch = &raster.channel(RasterChannel::kStatic);
  auto* route_ch = &raster.channel(RasterChannel::kRoute);

  for (const Landmark& lm : frame.landmarks) {
    if (lm.kind == LandmarkKind::kStopLine) continue;  // handled with the traffic light
    draw_polyline(landmarks_ch, geom, lm.points, 1.0f);
  }

  for (const AgentTrack& agent : frame.agents) {
    const int n = static_cast<int>(agent.history.size());
    for (int i = 0; i < n; ++i) {
      const float b = history_brightness(n - 1 - i, options.fade_alpha);
      if (b <= 0.0f) continue;
      fill_checked(agents_ch, geom,
                   box_to_polygon(agent_box(agent.history[i], agent.length, agent.width)), b,
                   options.strict && i == n - 1, "agent");
    }
  }

  {
    const int n = static_cast<int>(frame.ego_history.size());
    for (int i = 0; i < n; ++i) {
      const float b = history_brightness(n - i, options.fade_alpha);
      if (b <= 0.0f) continue;
      fill_polygon(ego_ch, geom,
                   box_to_polygon(agent_box(frame.ego_history[i], frame.ego_length, frame.ego_width)),
                   b);
    }
    const OrientedBox ego_box{frame.ego.position(), frame.ego.heading, frame.ego_length,
                              frame.ego_width};
    fill_checked(ego_ch, geom, box_to_polygon(ego_box), 1.0f, options.strict, "ego");
  }

  for (const Polygon& poly : frame.static_obstacles) {
    fill_checked(static_ch, geom, poly, 1.0f, options.strict, "static obstacle");
  }
  if (frame.occupancy != nullptr) {
    const OccupancyGrid& occ = *frame.occupancy;
    for (int r = 0; r < occ.geom.rows; ++r) {
      for (int c = 0; c < occ.geom.cols; ++c) {
        if (occ.at(r, c) != CellLabel::kStatic) continue;
        const Vec2 p = occ.geom.cell_to_world(r, c);
        const auto cell = geom.world_to_cell(p);
        if (cell) blend_max(static_ch, geom, cell->first, cell->second, 1.0f);
      }
    }
  }

  draw_polyline(route_ch, geom, frame.route.points, 1.0f);

  // Stop lines mask the route according to permissibility: prohibited draws
  // a full-intensity static polygon and clears the route beneath it, yield
  // draws at half intensity, permitted draws nothing.
  if (frame.traffic_light != TrafficLight::kPermitted) {
    const float intensity = frame.traffic_light == TrafficLight::kProhibited ? 1.0f : 0.5f;
    for (const Landmark& lm : frame.landmarks) {
      if (lm.kind != LandmarkKind::kStopLine) continue;
      for (std::size_t i = 0; i + 1 < lm.points.size(); ++i) {
        const Polygon box =
            segment_box(lm.points[i], lm.points[i + 1], options.stop_line_half_width);
        fill_polygon(static_ch, geom, box, intensity);
        if (frame.traffic_light == TrafficLight::kProhibited) {
          std::vector<float> mask(geom.cell_count(), 0.0f);
          fill_polygon(&mask, geom, box, 1.0f);
          for (std::size_t k = 0; k < mask.size(); ++k) {
            if (mask[k] > 0.0f) (*route_ch)[k] = 0.0f;
          }
        }
      }
    }
  }

  return raster;
}

void write_pgm(const std::string& path, const std::vector<float>& data, int rows, int cols,
               const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P2\n";
  if (!comment.empty()) out << "# " << comment << "\n";
  out << cols << " " << rows << "\n255\n";
  // Top row of the file is the northern edge.
  for (int r = rows - 1; r >= 0; --r) {
    for (int c = 0; c < cols; ++c) {
      const float v = data[static_cast<std::size_t>(r) * cols + c];
      const int gray = std::clamp(static_cast<int>(std::lround(v * 255.0f)), 0, 255);
      out << gray << (c + 1 == cols ? '\n' : ' ');
    }
  }
}

void write_grid_csv(const std::string& path, const std::vector<float>& data, int rows, int cols,
                    const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (!comment.empty()) out << "# " << comment << "\n";
  char buf[32];
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.6g", data[static_cast<std::size_t>(r) * cols + c]);
      out << buf << (c + 1 == cols ? '\n' : ',');
    }
  }
}

}  // namespace gridplan
