#include "gridplan/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gridplan {

namespace {

// Distance and signed lateral offset from a point to a polyline, one pass.
void point_to_polyline(const Vec2& p, const std::vector<Vec2>& pts, double* distance,
                       double* lateral) {
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_l = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Vec2 a = pts[i];
    const Vec2 ab = pts[i + 1] - a;
    const double len2 = ab.squared_norm();
    if (len2 < 1e-18) continue;
    const double u = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    const Vec2 foot = a + ab * u;
    const double d2 = (p - foot).squared_norm();
    if (d2 < best_d2 - 1e-15) {
      best_d2 = d2;
      best_l = ab.normalized().cross(p - foot);
    }
  }
  *distance = std::sqrt(best_d2);
  *lateral = best_l;
}

SoftSample bilinear(const float* cells, const GridGeometry& geom, float boundary,
                    const Vec2& p) {
  const double u = (p.x - geom.origin.x) / geom.resolution;
  const double v = (p.y - geom.origin.y) / geom.resolution;
  if (u < 0.0 || v < 0.0 || u > geom.cols - 1 || v > geom.rows - 1 || geom.cols < 2 ||
      geom.rows < 2) {
    return {static_cast<double>(boundary), 0.0, 0.0, true};
  }
  int j0 = std::min(static_cast<int>(u), geom.cols - 2);
  int i0 = std::min(static_cast<int>(v), geom.rows - 2);
  const double fu = u - j0;
  const double fv = v - i0;
  const std::size_t base = static_cast<std::size_t>(i0) * geom.cols + j0;
  const double c00 = cells[base];
  const double c01 = cells[base + 1];
  const double c10 = cells[base + geom.cols];
  const double c11 = cells[base + geom.cols + 1];
  SoftSample out;
  out.value = (1.0 - fv) * ((1.0 - fu) * c00 + fu * c01) + fv * ((1.0 - fu) * c10 + fu * c11);
  out.ddx = ((c01 - c00) * (1.0 - fv) + (c11 - c10) * fv) / geom.resolution;
  out.ddy = ((c10 - c00) * (1.0 - fu) + (c11 - c01) * fu) / geom.resolution;
  return out;
}

int snap_time_index(double t, int steps) {
  const int k = static_cast<int>(std::lround(t / kDt)) - 1;
  return std::clamp(k, 0, steps - 1);
}

}  // namespace

const std::array<std::string, 5>& CostModel::feature_names() {
  static const std::array<std::string, 5> names = {
      "occupancy", "prediction", "route_distance", "lateral_offset", "bias"};
  return names;
}

FeaturePlanes build_feature_planes(const BevRaster* raster, const OccupancyGrid& occ,
                                   const PredictionGrid& pred, const Route& route,
                                   const FeatureConfig& config) {
  if (!(occ.geom == pred.geom)) {
    throw std::invalid_argument("build_feature_planes: occupancy/prediction geometry mismatch");
  }
  if (raster != nullptr && !(raster->geom == occ.geom)) {
    throw std::invalid_argument("build_feature_planes: raster geometry mismatch");
  }
  if (route.points.size() < 2) {
    throw std::invalid_argument("build_feature_planes: route needs at least 2 points");
  }

  FeaturePlanes planes;
  planes.geom = occ.geom;
  planes.steps = pred.steps;
  planes.occ_cost = occupancy_cost_field(occ, config.inflation);
  planes.pred = pred;
  planes.route_distance = ScalarField::zeros(occ.geom);
  planes.lateral_offset = ScalarField::zeros(occ.geom);

  const GridGeometry& geom = occ.geom;
  const double dead = config.route_dead_zone;
  for (int r = 0; r < geom.rows; ++r) {
    for (int c = 0; c < geom.cols; ++c) {
      double dist = 0.0;
      double lat = 0.0;
      point_to_polyline(geom.cell_to_world(r, c), route.points, &dist, &lat);
      planes.route_distance.set(
          r, c, std::clamp((dist - dead) / config.route_distance_norm, 0.0, 1.0));
      planes.lateral_offset.set(
          r, c, std::clamp((std::abs(lat) - dead) / config.lateral_offset_norm, 0.0, 1.0));
    }
  }
  planes.route_distance.update_boundary_to_max();
  planes.lateral_offset.update_boundary_to_max();
  return planes;
}

CostVolume cost_volume(const CostModel& model, const FeaturePlanes& planes) {
  CostVolume volume = CostVolume::zeros(planes.geom, planes.steps);
  const std::size_t cells = planes.geom.cell_count();
  for (int t = 0; t < planes.steps; ++t) {
    const std::size_t base = volume.index(t, 0, 0);
    for (std::size_t i = 0; i < cells; ++i) {
      volume.data[base + i] = static_cast<float>(
          model.w_occ * planes.occ_cost.data[i] + model.w_pred * planes.pred.data[base + i] +
          model.w_route * planes.route_distance.data[i] +
          model.w_lat * planes.lateral_offset.data[i] + model.w_bias);
    }
  }
  volume.update_boundary_to_max();
  return volume;
}

SoftSample sample_soft(const ScalarField& field, const Vec2& p) {
  return bilinear(field.data.data(), field.geom, field.boundary_value, p);
}

SoftSample sample_soft(const SpaceTimeField& field, const Vec2& p, double t) {
  const int k = snap_time_index(t, field.steps);
  return bilinear(field.data.data() + field.index(k, 0, 0), field.geom, field.boundary_value, p);
}

CostBreakdown trajectory_cost(const Trajectory& traj, const CostVolume& volume,
                              const ScalarField& occ_cost, const PredictionGrid& grid,
                              double alpha, double beta) {
  CostBreakdown breakdown;
  breakdown.per_waypoint.reserve(traj.waypoints.size());
  for (const Waypoint& wp : traj.waypoints) {
    const SoftSample c = sample_soft(volume, wp.position(), wp.t);
    const SoftSample o = sample_soft(occ_cost, wp.position());
    const SoftSample g = sample_soft(grid, wp.position(), wp.t);
    breakdown.volume_term += c.value;
    breakdown.occupancy_term += alpha * o.value;
    breakdown.prediction_term += beta * g.value;
    breakdown.per_waypoint.push_back(c.value + alpha * o.value + beta * g.value);
    breakdown.out_of_extent |= c.out_of_extent || o.out_of_extent || g.out_of_extent;
  }
  breakdown.total =
      breakdown.volume_term + breakdown.occupancy_term + breakdown.prediction_term;
  return breakdown;
}

double diff_metric(const Trajectory& gt, const Trajectory& cand, const ScalarField& occ_cost,
                   const PredictionGrid& grid) {
  if (gt.waypoints.size() != cand.waypoints.size()) {
    throw std::invalid_argument("diff_metric: horizon mismatch");
  }
  double diff = 0.0;
  for (std::size_t k = 0; k < gt.waypoints.size(); ++k) {
    const Waypoint& g = gt.waypoints[k];
    const Waypoint& c = cand.waypoints[k];
    diff += (g.position() - c.position()).norm();
    diff += sample_soft(occ_cost, c.position()).value;
    diff += sample_soft(grid, c.position(), c.t).value;
  }
  return diff;
}

FeatureSums feature_sums(const Trajectory& traj, const FeaturePlanes& planes) {
  FeatureSums sums;
  for (const Waypoint& wp : traj.waypoints) {
    sums.occ += sample_soft(planes.occ_cost, wp.position()).value;
    sums.pred += sample_soft(planes.pred, wp.position(), wp.t).value;
    sums.route += sample_soft(planes.route_distance, wp.position()).value;
    sums.lat += sample_soft(planes.lateral_offset, wp.position()).value;
    sums.count += 1.0;
  }
  return sums;
}

double energy(const CostModel& model, const FeatureSums& sums) {
  return model.w_occ * sums.occ + model.w_pred * sums.pred + model.w_route * sums.route +
         model.w_lat * sums.lat + model.w_bias * sums.count + model.alpha * sums.occ +
         model.beta * sums.pred;
}

MarginFrame make_margin_frame(const FeaturePlanes& planes, const Trajectory& gt,
                              const CandidateSet& candidates) {
  MarginFrame frame;
  frame.gt = feature_sums(gt, planes);
  frame.candidates.reserve(candidates.size());
  frame.diffs.reserve(candidates.size());
  for (const Trajectory& cand : candidates.candidates) {
    const FeatureSums sums = feature_sums(cand, planes);
    double l2 = 0.0;
    for (std::size_t k = 0; k < gt.waypoints.size(); ++k) {
      l2 += (gt.waypoints[k].position() - cand.waypoints[k].position()).norm();
    }
    frame.diffs.push_back(l2 + sums.occ + sums.pred);
    frame.candidates.push_back(sums);
  }
  return frame;
}

MaxMarginResult max_margin_eval(const CostModel& model, const MarginFrame& frame) {
  if (frame.candidates.empty()) {
    throw std::invalid_argument("max_margin: empty candidate set");
  }
  const double e_gt = energy(model, frame.gt);
  MaxMarginResult result;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < frame.candidates.size(); ++i) {
    const double margin = e_gt - energy(model, frame.candidates[i]) + frame.diffs[i];
    if (margin > best) {
      best = margin;
      result.argmax = static_cast<int>(i);
    }
  }
  if (best <= 0.0) {
    result.loss = 0.0;
    result.argmax = -1;
    return result;
  }
  result.loss = best;
  const std::array<double, 5> g = frame.gt.as_array();
  const std::array<double, 5> c =
      frame.candidates[static_cast<std::size_t>(result.argmax)].as_array();
  for (int i = 0; i < 5; ++i) result.grad[static_cast<std::size_t>(i)] = g[i] - c[i];
  return result;
}

MaxMarginResult max_margin_loss(const CostModel& model, const FeaturePlanes& planes,
                                const Trajectory& gt, const CandidateSet& candidates) {
  return max_margin_eval(model, make_margin_frame(planes, gt, candidates));
}

namespace {

double mean_margin_loss(const CostModel& model, const std::vector<MarginFrame>& frames,
                        std::array<double, 5>* grad) {
  double loss = 0.0;
  if (grad) grad->fill(0.0);
  for (const MarginFrame& frame : frames) {
    const MaxMarginResult r = max_margin_eval(model, frame);
    loss += r.loss;
    if (grad) {
      for (int i = 0; i < 5; ++i) (*grad)[static_cast<std::size_t>(i)] += r.grad[i];
    }
  }
  const double n = static_cast<double>(frames.size());
  if (grad) {
    for (double& g : *grad) g /= n;
  }
  return loss / n;
}

}  // namespace

CostTrainResult train_cost_model(const std::vector<MarginFrame>& frames, const CostModel& init,
                                 const CostTrainConfig& config) {
  if (frames.empty()) throw std::invalid_argument("train_cost_model: empty dataset");

  CostTrainResult result;
  result.model = init;
  double lr = config.learning_rate;
  std::array<double, 5> grad{};
  double loss = mean_margin_loss(result.model, frames, &grad);
  result.loss_trace.push_back(loss);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (loss > config.divergence_threshold) {
      std::ostringstream os;
      os << "train_cost_model: diverged at epoch " << epoch << " with loss " << loss;
      throw std::runtime_error(os.str());
    }
    int backoffs = 0;
    bool stepped = false;
    while (backoffs < config.max_backoffs) {
      CostModel trial = result.model;
      std::array<double, 5> w = trial.weights();
      for (int i = 0; i < 5; ++i) w[static_cast<std::size_t>(i)] -= lr * grad[i];
      trial.set_weights(w);
      std::array<double, 5> trial_grad{};
      const double trial_loss = mean_margin_loss(trial, frames, &trial_grad);
      if (trial_loss <= loss + config.tolerance) {
        result.model = trial;
        loss = std::min(loss, trial_loss);
        grad = trial_grad;
        stepped = true;
        break;
      }
      lr *= 0.5;
      ++backoffs;
    }
    result.loss_trace.push_back(loss);
    if (!stepped) break;  // step size exhausted; converged
  }
  return result;
}

}  // namespace gridplan
