#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridplan/types.hpp"

namespace gridplan {

// One stored expert trajectory, normalized so the start pose sits at the
// origin with heading 0. Retrieval re-anchors it rigidly onto the query pose.
struct ExpertEntry {
  double v0{0.0};      // [m/s]
  double a0{0.0};      // [m/s^2]
  double kappa0{0.0};  // [1/m]
  std::vector<Waypoint> waypoints;
  Maneuver maneuver{Maneuver::kLaneKeep};
};

struct DbConfig {
  double bin_v{1.0};       // [m/s]
  double bin_a{0.5};       // [m/s^2]
  double bin_kappa{0.01};  // [1/m]
  int max_clusters_per_bin{8};
  int kmeans_max_iters{50};
  std::uint64_t seed{7};
};

struct RetrievalConfig {
  double beta_v{1.0};
  double beta_a{5.0};
  double beta_kappa{40.0};
  double radius{1.0};  // strict D < radius
};

// Bin index triple; bins are centered on integer multiples of the bin sizes
// (nearest-multiple convention).
struct BinKey {
  long v{0};
  long a{0};
  long kappa{0};
  bool operator<(const BinKey& o) const {
    if (v != o.v) return v < o.v;
    if (a != o.a) return a < o.a;
    return kappa < o.kappa;
  }
  bool operator==(const BinKey& o) const = default;
};

// Initial state (v0, a0, kappa0) derived from a trajectory's start anchor
// and its first waypoints; curvature is the three-point circumcircle at the
// start.
void initial_state_of(const Trajectory& traj, double* v0, double* a0, double* kappa0);

// Binned, clustered, k-d-tree-indexed library of expert trajectories.
class ExpertTrajectoryDb {
 public:
  // Bins raw trajectories by initial state, k-means-clusters each bin on
  // waypoint coordinates, keeps the medoid of each cluster, and indexes the
  // survivors. Throws std::invalid_argument on empty input.
  static ExpertTrajectoryDb build(const std::vector<Trajectory>& raw, const DbConfig& config = {});
  // Indexes pre-normalized entries directly (no clustering).
  static ExpertTrajectoryDb from_entries(std::vector<ExpertEntry> entries,
                                         const DbConfig& config = {});

  // Entry indices with weighted L1 distance D < config.radius, ascending by
  // entry index.
  std::vector<int> query(double v, double a, double kappa, const RetrievalConfig& config) const;

  const std::vector<ExpertEntry>& entries() const { return entries_; }
  const DbConfig& config() const { return config_; }
  BinKey bin_of(const ExpertEntry& entry) const;

  void save(const std::string& path) const;
  static ExpertTrajectoryDb load(const std::string& path);

 private:
  struct KdNode {
    int entry{-1};
    int axis{0};
    int left{-1};
    int right{-1};
  };

  void build_index();
  int build_kd(std::vector<int>* indices, int lo, int hi, int depth);
  void query_node(int node, const double* q, const double* betas, double radius,
                  std::vector<int>* out) const;

  std::vector<ExpertEntry> entries_;
  std::vector<KdNode> nodes_;
  int root_{-1};
  DbConfig config_;
};

// Retrieves all stored trajectories with D < radius around the ego's
// (v, a, kappa) and rigidly re-anchors them onto the ego pose.
CandidateSet retrieval_sampler(const EgoState& ego, const ExpertTrajectoryDb& db,
                               const RetrievalConfig& config = {});

}  // namespace gridplan
