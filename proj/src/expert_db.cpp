#include "gridplan/expert_db.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "gridplan/geometry.hpp"

namespace gridplan {

namespace {

double axis_value(const ExpertEntry& e, int axis) {
  switch (axis) {
    case 0: return e.v0;
    case 1: return e.a0;
    default: return e.kappa0;
  }
}

std::vector<double> flatten_positions(const ExpertEntry& e) {
  std::vector<double> f;
  f.reserve(e.waypoints.size() * 2);
  for (const Waypoint& wp : e.waypoints) {
    f.push_back(wp.x);
    f.push_back(wp.y);
  }
  return f;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

// k-means with medoid retention: returns indices (into `members`) of the
// retained representatives.
std::vector<int> cluster_medoids(const std::vector<std::vector<double>>& features, int k,
                                 int max_iters, std::mt19937_64* rng) {
  const int n = static_cast<int>(features.size());
  k = std::min(k, n);
  std::vector<int> init(n);
  for (int i = 0; i < n; ++i) init[i] = i;
  std::shuffle(init.begin(), init.end(), *rng);
  std::vector<std::vector<double>> centers;
  centers.reserve(k);
  for (int i = 0; i < k; ++i) centers.push_back(features[init[i]]);

  std::vector<int> assignment(n, 0);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = squared_distance(features[i], centers[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (assignment[i] != best_c) {
        assignment[i] = best_c;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    for (int c = 0; c < k; ++c) {
      std::vector<double> mean(features[0].size(), 0.0);
      int count = 0;
      for (int i = 0; i < n; ++i) {
        if (assignment[i] != c) continue;
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += features[i][d];
        ++count;
      }
      if (count > 0) {
        for (double& m : mean) m /= count;
        centers[c] = std::move(mean);
      }
    }
  }

  std::vector<int> medoids;
  for (int c = 0; c < k; ++c) {
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1;
    for (int i = 0; i < n; ++i) {
      if (assignment[i] != c) continue;
      const double d = squared_distance(features[i], centers[c]);
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    if (best_i >= 0) medoids.push_back(best_i);
  }
  std::sort(medoids.begin(), medoids.end());
  return medoids;
}

void write_f64(std::ofstream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
double read_f64(std::ifstream& in) {
  double v = 0.0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::uint32_t read_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}
std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

constexpr char kMagic[4] = {'G', 'P', 'D', 'B'};
constexpr std::uint32_t kDbVersion = 1;

}  // namespace

void initial_state_of(const Trajectory& traj, double* v0, double* a0, double* kappa0) {
  if (traj.waypoints.size() < 2) {
    throw std::invalid_argument("initial_state_of: trajectory too short");
  }
  *v0 = traj.start.v;
  *a0 = (traj.waypoints[0].v - traj.start.v) / kDt;
  *kappa0 = three_point_curvature(traj.start.position(), traj.waypoints[0].position(),
                                  traj.waypoints[1].position());
}

BinKey ExpertTrajectoryDb::bin_of(const ExpertEntry& entry) const {
  return {std::lround(entry.v0 / config_.bin_v), std::lround(entry.a0 / config_.bin_a),
          std::lround(entry.kappa0 / config_.bin_kappa)};
}

ExpertTrajectoryDb ExpertTrajectoryDb::build(const std::vector<Trajectory>& raw,
                                             const DbConfig& config) {
  if (raw.empty()) throw std::invalid_argument("build_expert_db: empty input");

  std::vector<ExpertEntry> normalized;
  normalized.reserve(raw.size());
  for (const Trajectory& traj : raw) {
    ExpertEntry e;
    initial_state_of(traj, &e.v0, &e.a0, &e.kappa0);
    e.maneuver = traj.maneuver;
    const Vec2 origin = traj.start.position();
    const double rot = -traj.start.heading;
    e.waypoints.reserve(traj.waypoints.size());
    for (const Waypoint& wp : traj.waypoints) {
      const Vec2 p = (wp.position() - origin).rotated(rot);
      e.waypoints.push_back({wp.t, p.x, p.y, wrap_angle(wp.heading + rot), wp.v});
    }
    normalized.push_back(std::move(e));
  }

  ExpertTrajectoryDb db;
  db.config_ = config;

  // Bin by initial state, cluster each bin, keep medoids.
  std::map<BinKey, std::vector<int>> bins;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    bins[db.bin_of(normalized[i])].push_back(static_cast<int>(i));
  }
  std::mt19937_64 rng(config.seed);
  for (const auto& [key, members] : bins) {
    std::vector<std::vector<double>> features;
    features.reserve(members.size());
    for (int idx : members) features.push_back(flatten_positions(normalized[idx]));
    const std::vector<int> medoids =
        cluster_medoids(features, config.max_clusters_per_bin, config.kmeans_max_iters, &rng);
    for (int m : medoids) db.entries_.push_back(normalized[static_cast<std::size_t>(members[m])]);
  }

  db.build_index();
  return db;
}

ExpertTrajectoryDb ExpertTrajectoryDb::from_entries(std::vector<ExpertEntry> entries,
                                                    const DbConfig& config) {
  ExpertTrajectoryDb db;
  db.config_ = config;
  db.entries_ = std::move(entries);
  db.build_index();
  return db;
}

void ExpertTrajectoryDb::build_index() {
  nodes_.clear();
  nodes_.reserve(entries_.size());
  std::vector<int> indices(entries_.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<int>(i);
  root_ = entries_.empty() ? -1
                           : build_kd(&indices, 0, static_cast<int>(indices.size()), 0);
}

int ExpertTrajectoryDb::build_kd(std::vector<int>* indices, int lo, int hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 3;
  const int mid = lo + (hi - lo) / 2;
  std::nth_element(indices->begin() + lo, indices->begin() + mid, indices->begin() + hi,
                   [this, axis](int a, int b) {
                     const double va = axis_value(entries_[a], axis);
                     const double vb = axis_value(entries_[b], axis);
                     if (va != vb) return va < vb;
                     return a < b;
                   });
  const int node_index = static_cast<int>(nodes_.size());
  nodes_.push_back({(*indices)[mid], axis, -1, -1});
  const int left = build_kd(indices, lo, mid, depth + 1);
  const int right = build_kd(indices, mid + 1, hi, depth + 1);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  return node_index;
}

void ExpertTrajectoryDb::query_node(int node, const double* q, const double* betas,
                                    double radius, std::vector<int>* out) const {
  if (node < 0) return;
  const KdNode& n = nodes_[node];
  const ExpertEntry& e = entries_[n.entry];
  const double d = betas[0] * std::abs(e.v0 - q[0]) + betas[1] * std::abs(e.a0 - q[1]) +
                   betas[2] * std::abs(e.kappa0 - q[2]);
  if (d < radius) out->push_back(n.entry);
  const double delta = q[n.axis] - axis_value(e, n.axis);
  const int near = delta < 0.0 ? n.left : n.right;
  const int far = delta < 0.0 ? n.right : n.left;
  query_node(near, q, betas, radius, out);
  if (betas[n.axis] * std::abs(delta) < radius) {
    query_node(far, q, betas, radius, out);
  }
}

std::vector<int> ExpertTrajectoryDb::query(double v, double a, double kappa,
                                           const RetrievalConfig& config) const {
  const double q[3] = {v, a, kappa};
  const double betas[3] = {config.beta_v, config.beta_a, config.beta_kappa};
  std::vector<int> out;
  query_node(root_, q, betas, config.radius, &out);
  std::sort(out.begin(), out.end());
  return out;
}

void ExpertTrajectoryDb::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write expert db: " + path);
  out.write(kMagic, 4);
  write_u32(out, kDbVersion);
  write_f64(out, config_.bin_v);
  write_f64(out, config_.bin_a);
  write_f64(out, config_.bin_kappa);
  write_u64(out, entries_.size());
  for (const ExpertEntry& e : entries_) {
    write_f64(out, e.v0);
    write_f64(out, e.a0);
    write_f64(out, e.kappa0);
    write_u32(out, static_cast<std::uint32_t>(e.maneuver));
    write_u32(out, static_cast<std::uint32_t>(e.waypoints.size()));
    for (const Waypoint& wp : e.waypoints) {
      write_f64(out, wp.t);
      write_f64(out, wp.x);
      write_f64(out, wp.y);
      write_f64(out, wp.heading);
      write_f64(out, wp.v);
    }
  }
}

ExpertTrajectoryDb ExpertTrajectoryDb::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open expert db: " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("expert db: bad magic in " + path);
  }
  const std::uint32_t version = read_u32(in);
  if (version != kDbVersion) {
    throw std::runtime_error("expert db: unsupported version " + std::to_string(version));
  }
  ExpertTrajectoryDb db;
  db.config_.bin_v = read_f64(in);
  db.config_.bin_a = read_f64(in);
  db.config_.bin_kappa = read_f64(in);
  const std::uint64_t count = read_u64(in);
  db.entries_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ExpertEntry e;
    e.v0 = read_f64(in);
    e.a0 = read_f64(in);
    e.kappa0 = read_f64(in);
    e.maneuver = static_cast<Maneuver>(read_u32(in));
    const std::uint32_t n = read_u32(in);
    e.waypoints.reserve(n);
    for (std::uint32_t k = 0; k < n; ++k) {
      Waypoint wp;
      wp.t = read_f64(in);
      wp.x = read_f64(in);
      wp.y = read_f64(in);
      wp.heading = read_f64(in);
      wp.v = read_f64(in);
      e.waypoints.push_back(wp);
    }
    db.entries_.push_back(std::move(e));
  }
  if (!in) throw std::runtime_error("expert db: truncated file " + path);
  db.build_index();
  return db;
}

CandidateSet retrieval_sampler(const EgoState& ego, const ExpertTrajectoryDb& db,
                               const RetrievalConfig& config) {
  CandidateSet set;
  const std::vector<int> hits = db.query(ego.v, ego.a, ego.kappa, config);
  for (int idx : hits) {
    const ExpertEntry& e = db.entries()[static_cast<std::size_t>(idx)];
    Trajectory traj;
    traj.source = TrajectorySource::kRetrieval;
    traj.maneuver = e.maneuver;
    traj.start = {0.0, ego.x, ego.y, ego.heading, ego.v};
    traj.waypoints.reserve(e.waypoints.size());
    for (const Waypoint& wp : e.waypoints) {
      const Vec2 p = ego.position() + wp.position().rotated(ego.heading);
      traj.waypoints.push_back({wp.t, p.x, p.y, wrap_angle(wp.heading + ego.heading), wp.v});
    }
    set.add(std::move(traj));
  }
  return set;
}

}  // namespace gridplan
