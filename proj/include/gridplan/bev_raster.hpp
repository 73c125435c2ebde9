#pragma once

#include <array>
#include <string>
#include <vector>

#include "gridplan/grid.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

// Channel order of the BEV raster tensor (H, W, C) = (500, 500, 5).
enum class RasterChannel : int {
  kLandmarks = 0,  // lane centers, dividers, road boundaries
  kAgents = 1,     // agent boxes with fading history
  kEgo = 2,        // ego box with fading history
  kStatic = 3,     // static obstacles + static-labeled occupancy (+ stop lines)
  kRoute = 4,
};

struct BevRaster {
  GridGeometry geom;
  std::array<std::vector<float>, kRasterChannels> channels;

  static BevRaster zeros(const GridGeometry& geom);
  double at(RasterChannel ch, int row, int col) const {
    return channels[static_cast<int>(ch)][static_cast<std::size_t>(row) * geom.cols + col];
  }
  std::vector<float>& channel(RasterChannel ch) { return channels[static_cast<int>(ch)]; }
  const std::vector<float>& channel(RasterChannel ch) const {
    return channels[static_cast<int>(ch)];
  }
};

// One frame's worth of scene content to draw.
struct SceneFrame {
  EgoState ego;
  double ego_length{4.9};
  double ego_width{1.9};
  std::vector<AgentState> ego_history;  // oldest first, excludes the current pose
  std::vector<AgentTrack> agents;
  std::vector<Landmark> landmarks;
  std::vector<Polygon> static_obstacles;
  const OccupancyGrid* occupancy{nullptr};  // optional; static cells drawn
  Route route;
  TrafficLight traffic_light{TrafficLight::kPermitted};
};

struct RasterOptions {
  double fade_alpha{0.05};        // per-step history dimming
  bool strict{false};             // error out when a polygon is fully off-raster
  double stop_line_half_width{0.3};  // [m]
};

// Draws the frame into a fresh raster. History polygons fade with age:
// brightness = max(0, 1 - age_steps * fade_alpha). Stop lines mask the route
// according to traffic-light permissibility.
BevRaster rasterize_scene(const SceneFrame& frame, const GridGeometry& geom,
                          const RasterOptions& options = {});

// Scanline polygon fill with cell-center inclusion; blends by per-cell max.
// Returns false when the polygon covered no cell.
bool fill_polygon(std::vector<float>* channel, const GridGeometry& geom, const Polygon& poly,
                  float intensity);
void draw_polyline(std::vector<float>* channel, const GridGeometry& geom,
                   const std::vector<Vec2>& points, float intensity);

// Plain-text exports (P2 graymap / numeric CSV grid).
void write_pgm(const std::string& path, const std::vector<float>& data, int rows, int cols,
               const std::string& comment);
void write_grid_csv(const std::string& path, const std::vector<float>& data, int rows, int cols,
                    const std::string& comment);

}  // namespace gridplan
