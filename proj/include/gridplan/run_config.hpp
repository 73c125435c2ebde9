#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridplan/evaluator.hpp"
#include "gridplan/generator.hpp"
#include "gridplan/scenario_bank.hpp"
#include "gridplan/simulator.hpp"

namespace gridplan {

// One structured config file drives every CLI verb; flags override file
// values (documented precedence: defaults < file < flags).
struct RunConfig {
  PlannerSetup setup;
  CostTrainConfig cost_training;
  GanConfig gan_training;
  DatasetConfig dataset;
  std::vector<std::string> scenario_paths;
  std::string output_dir{"out"};
};

RunConfig run_config_from_json(const std::string& text);
std::string run_config_to_json(const RunConfig& config);
RunConfig load_run_config(const std::string& path);

// FNV-1a over the canonical JSON rendering; stamped into every output file.
std::string config_hash(const RunConfig& config);

// Versioned model file: cost weights with their feature-plane names, alpha,
// beta, and optionally the generator parameters.
void save_model(const std::string& path, const CostModel& model,
                const std::optional<ToyGenerator>& generator, const std::string& hash);
struct LoadedModel {
  CostModel model;
  std::optional<ToyGenerator> generator;
};
LoadedModel load_model(const std::string& path);

// Candidate-set export shared by the CLI and the library-equivalence tests.
std::string candidate_set_to_json(const CandidateSet& set, const std::string& hash);

std::string format_cost_breakdown(const CostBreakdown& breakdown);

}  // namespace gridplan
