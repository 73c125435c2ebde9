#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "gridplan/evaluator.hpp"
#include "gridplan/geometry.hpp"
#include "gridplan/lattice_sampler.hpp"
#include "gridplan/types.hpp"

namespace gridplan {

inline constexpr int kConditioningDim = 7;
inline constexpr int kGeneratorOutputDim = 5;  // [c3, c4, d3, d4, d5]

// Frame conditioning for the generative planner: route (as a reference
// line), ego state, and target speed.
struct GeneratorContext {
  EgoState ego;
  ReferenceLine ref;
  double target_speed{0.0};
  FrenetState init;
  double lateral_span{20.0};  // normalization span S for the lateral basis [m]

  // Scaled (ego v, ego a, target speed, lateral offset, route curvature at
  // three lookahead points).
  std::array<double, kConditioningDim> conditioning() const;
};

GeneratorContext make_generator_context(const EgoState& ego, const ReferenceLine& ref,
                                        double target_speed);

// Affine map from [conditioning || latent] to the free coefficients of a
// longitudinal quartic and a lateral quintic in the route's Frenet frame.
// Start conditions are substituted from the ego state, never generated, so
// every emitted trajectory is start-continuous by construction.
struct ToyGenerator {
  int latent_dim{4};
  int modes{6};  // draws per frame during training
  std::vector<double> weights;  // kGeneratorOutputDim x (kConditioningDim + latent_dim)
  std::array<double, kGeneratorOutputDim> bias{};

  int input_dim() const { return kConditioningDim + latent_dim; }
  static ToyGenerator zeros(int latent_dim, int modes = 6);
  // Emits the given coefficients regardless of input (for tests and
  // deterministic anchors).
  static ToyGenerator constant(const std::array<double, kGeneratorOutputDim>& out,
                               int latent_dim = 4);

  std::array<double, kGeneratorOutputDim> output(const GeneratorContext& ctx,
                                                 const std::vector<double>& latent) const;
  Trajectory decode(const GeneratorContext& ctx, const std::vector<double>& latent) const;
};

// Standard normal via Box-Muller on the given engine; deterministic across
// platforms for a fixed seed.
double normal_sample(std::mt19937_64& rng);
std::vector<double> draw_latent(int dim, std::mt19937_64& rng);

// M trajectories from M independent unit-Gaussian latent draws.
CandidateSet sample_generator(const ToyGenerator& gen, const GeneratorContext& ctx, int draws,
                              std::uint64_t seed);

struct GanFrame {
  GeneratorContext ctx;
  FeaturePlanes planes;
  Trajectory gt;
};

struct GanConfig {
  int draws{6};
  int epochs{120};
  int pretrain_epochs{80};  // imitation-only warm start
  double lr_generator{0.02};
  double lr_evaluator{1e-4};  // 0 freezes the evaluator
  double divergence_threshold{1e6};
  std::uint64_t seed{11};
  int latent_dim{4};
  double init_scale{0.01};
};

struct GanTrainResult {
  ToyGenerator generator;
  CostModel evaluator;
  std::vector<double> generator_loss_trace;
  std::vector<double> evaluator_loss_trace;
};

// Alternating adversarial training: the generator descends
// E(G(m)) + L_imit(gt, G(m)) through the soft grid samples and the
// polynomial map; the evaluator applies the max-margin update with the
// generator outputs as candidates. Deterministic under the seed. Throws
// std::runtime_error on divergence.
GanTrainResult train_gan_planner(const std::vector<GanFrame>& frames,
                                 const CostModel& evaluator_init, const GanConfig& config = {});

// Per-trajectory energy sampled directly from the feature planes (value and
// spatial gradient), used by the generator's gradient chain.
struct EnergySample {
  double value{0.0};
  double ddx{0.0};
  double ddy{0.0};
};
EnergySample sample_energy(const CostModel& model, const FeaturePlanes& planes, const Vec2& p,
                           double t);

}  // namespace gridplan
