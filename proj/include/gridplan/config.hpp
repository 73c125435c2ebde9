#pragma once

namespace gridplan {

// Planning time base shared by every module: 10 Hz tick, 3.0 s planning
// horizon, 1.5 s observation history.
inline constexpr double kDt = 0.1;             // [s]
inline constexpr int kHorizonSteps = 30;       // future waypoints per trajectory
inline constexpr int kHistorySteps = 15;       // past states kept per agent
inline constexpr double kHorizonSeconds = kHorizonSteps * kDt;

// Grid defaults. The BEV raster is a fixed 500x500x5 tensor; at 0.2 m per
// cell that spans 100 m x 100 m centered on the ego vehicle.
inline constexpr double kDefaultResolution = 0.2;   // [m / cell]
inline constexpr int kRasterSize = 500;             // cells per side
inline constexpr int kRasterChannels = 5;
inline constexpr double kDefaultRasterExtent = kRasterSize * kDefaultResolution;

}  // namespace gridplan
