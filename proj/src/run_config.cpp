#include "gridplan/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "gridplan/scenario_io.hpp"

namespace gridplan {

using nlohmann::json;

namespace {

json doubles(const std::vector<double>& v) { return json(v); }

std::vector<double> doubles_from(const json& j, const std::vector<double>& fallback) {
  if (!j.is_array()) return fallback;
  std::vector<double> out;
  for (const auto& e : j) out.push_back(e.get<double>());
  return out;
}

json model_to_json(const CostModel& m) {
  json j;
  const auto& names = CostModel::feature_names();
  const auto w = m.weights();
  for (std::size_t i = 0; i < names.size(); ++i) j["weights"][names[i]] = w[i];
  j["alpha"] = m.alpha;
  j["beta"] = m.beta;
  return j;
}

CostModel model_from_json(const json& j) {
  CostModel m;
  const auto& names = CostModel::feature_names();
  std::array<double, 5> w{};
  if (j.contains("weights")) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      w[i] = j["weights"].value(names[i], 0.0);
    }
  }
  m.set_weights(w);
  m.alpha = j.value("alpha", 1.0);
  m.beta = j.value("beta", 1.0);
  return m;
}

json generator_to_json(const ToyGenerator& g) {
  json j;
  j["latent_dim"] = g.latent_dim;
  j["modes"] = g.modes;
  j["bias"] = std::vector<double>(g.bias.begin(), g.bias.end());
  j["weights"] = g.weights;
  return j;
}

ToyGenerator generator_from_json(const json& j) {
  ToyGenerator g = ToyGenerator::zeros(j.value("latent_dim", 4), j.value("modes", 6));
  const auto bias = j.value("bias", std::vector<double>{});
  for (std::size_t i = 0; i < bias.size() && i < g.bias.size(); ++i) g.bias[i] = bias[i];
  const auto weights = j.value("weights", std::vector<double>{});
  if (weights.size() != g.weights.size()) {
    throw std::runtime_error("model file: generator weight count mismatch");
  }
  g.weights = weights;
  return g;
}

}  // namespace

std::string run_config_to_json(const RunConfig& c) {
  json j;
  j["format_version"] = 1;
  j["output_dir"] = c.output_dir;
  j["scenario_paths"] = c.scenario_paths;

  json samplers;
  samplers["curve"] = c.setup.samplers.curve;
  samplers["retrieval"] = c.setup.samplers.retrieval;
  samplers["lattice"] = c.setup.samplers.lattice;
  samplers["generator"] = c.setup.samplers.generator;
  j["samplers"] = samplers;

  j["model"] = model_to_json(c.setup.model);

  json curve;
  curve["accelerations"] = doubles(c.setup.curve.accelerations);
  curve["steering_angles"] = doubles(c.setup.curve.steering_angles);
  curve["clothoid_scales"] = doubles(c.setup.curve.clothoid_scales);
  j["curve"] = curve;

  json lattice;
  lattice["cruise_speed_offsets"] = doubles(c.setup.lattice.cruise_speed_offsets);
  lattice["lateral_offsets"] = doubles(c.setup.lattice.lateral_offsets);
  lattice["lane_change"] = c.setup.lattice.lane_change;
  lattice["lane_width"] = c.setup.lattice.lane_width;
  lattice["follow_gaps"] = doubles(c.setup.lattice.follow_gaps);
  lattice["overtake_gaps"] = doubles(c.setup.lattice.overtake_gaps);
  lattice["stop_times"] = doubles(c.setup.lattice.stop_times);
  lattice["stop_margin"] = c.setup.lattice.stop_margin;
  j["lattice"] = lattice;

  json safety;
  safety["reserve_n"] = c.setup.safety.reserve_n;
  safety["lambda_consistency"] = c.setup.safety.lambda_consistency;
  safety["lateral_margin"] = c.setup.safety.lateral_margin;
  safety["longitudinal_margin"] = c.setup.safety.longitudinal_margin;
  j["safety"] = safety;

  json training;
  training["learning_rate"] = c.cost_training.learning_rate;
  training["epochs"] = c.cost_training.epochs;
  j["cost_training"] = training;

  json gan;
  gan["draws"] = c.gan_training.draws;
  gan["epochs"] = c.gan_training.epochs;
  gan["pretrain_epochs"] = c.gan_training.pretrain_epochs;
  gan["lr_generator"] = c.gan_training.lr_generator;
  gan["lr_evaluator"] = c.gan_training.lr_evaluator;
  gan["seed"] = c.gan_training.seed;
  j["gan_training"] = gan;

  json dataset;
  dataset["frames"] = c.dataset.frames;
  dataset["seed"] = c.dataset.seed;
  dataset["grid_extent"] = c.dataset.grid_extent;
  j["dataset"] = dataset;

  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  c.setup = default_planner_setup();
  c.output_dir = j.value("output_dir", c.output_dir);
  c.scenario_paths = j.value("scenario_paths", c.scenario_paths);
  if (j.contains("samplers")) {
    const json& s = j["samplers"];
    c.setup.samplers.curve = s.value("curve", c.setup.samplers.curve);
    c.setup.samplers.retrieval = s.value("retrieval", c.setup.samplers.retrieval);
    c.setup.samplers.lattice = s.value("lattice", c.setup.samplers.lattice);
    c.setup.samplers.generator = s.value("generator", c.setup.samplers.generator);
  }
  if (j.contains("model")) c.setup.model = model_from_json(j["model"]);
  if (j.contains("curve")) {
    const json& s = j["curve"];
    c.setup.curve.accelerations =
        doubles_from(s.value("accelerations", json()), c.setup.curve.accelerations);
    c.setup.curve.steering_angles =
        doubles_from(s.value("steering_angles", json()), c.setup.curve.steering_angles);
    c.setup.curve.clothoid_scales =
        doubles_from(s.value("clothoid_scales", json()), c.setup.curve.clothoid_scales);
  }
  if (j.contains("lattice")) {
    const json& s = j["lattice"];
    c.setup.lattice.cruise_speed_offsets = doubles_from(s.value("cruise_speed_offsets", json()),
                                                        c.setup.lattice.cruise_speed_offsets);
    c.setup.lattice.lateral_offsets =
        doubles_from(s.value("lateral_offsets", json()), c.setup.lattice.lateral_offsets);
    c.setup.lattice.lane_change = s.value("lane_change", c.setup.lattice.lane_change);
    c.setup.lattice.lane_width = s.value("lane_width", c.setup.lattice.lane_width);
    c.setup.lattice.follow_gaps =
        doubles_from(s.value("follow_gaps", json()), c.setup.lattice.follow_gaps);
    c.setup.lattice.overtake_gaps =
        doubles_from(s.value("overtake_gaps", json()), c.setup.lattice.overtake_gaps);
    c.setup.lattice.stop_times =
        doubles_from(s.value("stop_times", json()), c.setup.lattice.stop_times);
    c.setup.lattice.stop_margin = s.value("stop_margin", c.setup.lattice.stop_margin);
  }
  if (j.contains("safety")) {
    const json& s = j["safety"];
    c.setup.safety.reserve_n = s.value("reserve_n", c.setup.safety.reserve_n);
    c.setup.safety.lambda_consistency =
        s.value("lambda_consistency", c.setup.safety.lambda_consistency);
    c.setup.safety.lateral_margin = s.value("lateral_margin", c.setup.safety.lateral_margin);
    c.setup.safety.longitudinal_margin =
        s.value("longitudinal_margin", c.setup.safety.longitudinal_margin);
  }
  if (j.contains("cost_training")) {
    const json& s = j["cost_training"];
    c.cost_training.learning_rate = s.value("learning_rate", c.cost_training.learning_rate);
    c.cost_training.epochs = s.value("epochs", c.cost_training.epochs);
  }
  if (j.contains("gan_training")) {
    const json& s = j["gan_training"];
    c.gan_training.draws = s.value("draws", c.gan_training.draws);
    c.gan_training.epochs = s.value("epochs", c.gan_training.epochs);
    c.gan_training.pretrain_epochs = s.value("pretrain_epochs", c.gan_training.pretrain_epochs);
    c.gan_training.lr_generator = s.value("lr_generator", c.gan_training.lr_generator);
    c.gan_training.lr_evaluator = s.value("lr_evaluator", c.gan_training.lr_evaluator);
    c.gan_training.seed = s.value("seed", c.gan_training.seed);
  }
  if (j.contains("dataset")) {
    const json& s = j["dataset"];
    c.dataset.frames = s.value("frames", c.dataset.frames);
    c.dataset.seed = s.value("seed", c.dataset.seed);
    c.dataset.grid_extent = s.value("grid_extent", c.dataset.grid_extent);
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return run_config_from_json(buf.str());
}

std::string config_hash(const RunConfig& config) {
  const std::string text = run_config_to_json(config);
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void save_model(const std::string& path, const CostModel& model,
                const std::optional<ToyGenerator>& generator, const std::string& hash) {
  json j;
  j["format_version"] = 1;
  j["config_hash"] = hash;
  j["cost"] = model_to_json(model);
  if (generator) j["generator"] = generator_to_json(*generator);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << j.dump(2) << "\n";
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("model parse error: ") + e.what());
  }
  if (j.value("format_version", -1) != 1) {
    throw std::runtime_error("model file: unsupported format_version");
  }
  LoadedModel loaded;
  loaded.model = model_from_json(j.at("cost"));
  if (j.contains("generator")) loaded.generator = generator_from_json(j["generator"]);
  return loaded;
}

std::string candidate_set_to_json(const CandidateSet& set, const std::string& hash) {
  json j;
  j["format_version"] = 1;
  j["config_hash"] = hash;
  json sources;
  for (int i = 0; i < kTrajectorySourceCount; ++i) {
    sources[to_string(static_cast<TrajectorySource>(i))] = set.source_counts[i];
  }
  j["source_counts"] = sources;
  j["warnings"] = set.warnings;
  json candidates = json::array();
  for (const Trajectory& traj : set.candidates) {
    candidates.push_back(json::parse(trajectory_to_json(traj)));
  }
  j["candidates"] = candidates;
  return j.dump(2) + "\n";
}

std::string format_cost_breakdown(const CostBreakdown& b) {
  char buf[64];
  std::ostringstream os;
  auto line = [&](const char* name, double v) {
    std::snprintf(buf, sizeof(buf), "%-18s %.9g\n", name, v);
    os << buf;
  };
  line("total", b.total);
  line("volume_term", b.volume_term);
  line("occupancy_term", b.occupancy_term);
  line("prediction_term", b.prediction_term);
  os << "out_of_extent " << (b.out_of_extent ? "yes" : "no") << "\n";
  os << "per_waypoint";
  for (double v : b.per_waypoint) {
    std::snprintf(buf, sizeof(buf), " %.9g", v);
    os << buf;
  }
  os << "\n";
  return os.str();
}

}  // namespace gridplan
