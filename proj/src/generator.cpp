#include "gridplan/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gridplan {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kHorizon = kHorizonSeconds;

struct RefSample {
  Vec2 base;
  Vec2 tangent;
  Vec2 normal;
  double heading{0.0};
  double kappa{0.0};
};

RefSample sample_ref_extended(const ReferenceLine& ref, double s) {
  RefSample out;
  const double len = ref.length();
  const double sc = std::min(s, len);
  out.tangent = ref.tangent_at(sc);
  out.normal = ref.normal_at(sc);
  out.heading = ref.heading_at(sc);
  if (s <= len) {
    out.base = ref.point_at(s);
    out.kappa = ref.curvature_at(s);
  } else {
    out.base = ref.point_at(len) + out.tangent * (s - len);
    out.kappa = 0.0;
  }
  return out;
}

// Longitudinal basis: s(t) = base(t) + c3 * T (t/T)^3 + c4 * T (t/T)^4.
double basis_s(int j, double t) {
  const double u = t / kHorizon;
  return j == 0 ? kHorizon * u * u * u : kHorizon * u * u * u * u;
}
double basis_s_dot(int j, double t) {
  const double u = t / kHorizon;
  return j == 0 ? 3.0 * u * u : 4.0 * u * u * u;
}
// Lateral basis over sigma with span S: Bl_j(sigma) = S (sigma/S)^(j+3).
double basis_l(int j, double sigma, double span) {
  const double u = sigma / span;
  double p = u * u * u;
  for (int k = 0; k < j; ++k) p *= u;
  return span * p;
}
double basis_l_prime(int j, double sigma, double span) {
  const double u = sigma / span;
  double p = u * u;
  for (int k = 0; k < j; ++k) p *= u;
  return (3.0 + j) * p;
}

// Per-waypoint jacobian of the position w.r.t. the 5 free coefficients.
struct WaypointJacobian {
  std::array<Vec2, kGeneratorOutputDim> dpos;
};

struct DecodeScratch {
  Trajectory traj;
  std::vector<WaypointJacobian> jacobian;  // one per waypoint
};

void decode_internal(const ToyGenerator& gen, const GeneratorContext& ctx,
                     const std::array<double, kGeneratorOutputDim>& out, bool with_jacobian,
                     DecodeScratch* scratch) {
  const FrenetState& init = ctx.init;
  const double span = ctx.lateral_span;

  Trajectory& traj = scratch->traj;
  traj = Trajectory{};
  traj.source = TrajectorySource::kGan;
  traj.maneuver = Maneuver::kGenerative;
  traj.start = {0.0, ctx.ego.x, ctx.ego.y, ctx.ego.heading, ctx.ego.v};
  traj.waypoints.reserve(kHorizonSteps);
  if (with_jacobian) {
    scratch->jacobian.assign(kHorizonSteps, WaypointJacobian{});
  }

  for (int k = 1; k <= kHorizonSteps; ++k) {
    const double t = kDt * k;
    double s = init.s + init.s_dot * t + 0.5 * init.s_ddot * t * t;
    double s_dot = init.s_dot + init.s_ddot * t;
    for (int j = 0; j < 2; ++j) {
      s += out[static_cast<std::size_t>(j)] * basis_s(j, t);
      s_dot += out[static_cast<std::size_t>(j)] * basis_s_dot(j, t);
    }
    s = std::max(s, init.s);  // keep the frame well-defined early in training
    const double sigma = s - init.s;
    double l = init.l + init.l_prime * sigma + 0.5 * init.l_pprime * sigma * sigma;
    double l_prime = init.l_prime + init.l_pprime * sigma;
    for (int j = 0; j < 3; ++j) {
      l += out[static_cast<std::size_t>(j + 2)] * basis_l(j, sigma, span);
      l_prime += out[static_cast<std::size_t>(j + 2)] * basis_l_prime(j, sigma, span);
    }

    const RefSample rs = sample_ref_extended(ctx.ref, s);
    const double one_kl = std::max(0.1, 1.0 - rs.kappa * l);
    const Vec2 p = rs.base + rs.normal * l;
    const double heading = wrap_angle(rs.heading + std::atan2(l_prime, one_kl));
    const double v = std::max(0.0, s_dot) * std::sqrt(one_kl * one_kl + l_prime * l_prime);
    traj.waypoints.push_back({t, p.x, p.y, heading, v});

    if (with_jacobian) {
      WaypointJacobian& jac = scratch->jacobian[static_cast<std::size_t>(k - 1)];
      const Vec2 dpos_ds = rs.tangent * one_kl;
      for (int j = 0; j < kGeneratorOutputDim; ++j) {
        double ds = 0.0;
        double dl = 0.0;
        if (j < 2) {
          ds = basis_s(j, t);
          dl = l_prime * ds;  // lateral shifts with sigma
        } else {
          dl = basis_l(j - 2, sigma, span);
        }
        jac.dpos[static_cast<std::size_t>(j)] = dpos_ds * ds + rs.normal * dl;
      }
    }
  }
  (void)gen;
}

}  // namespace

std::array<double, kConditioningDim> GeneratorContext::conditioning() const {
  const double len = ref.length();
  auto kappa_at = [this, len](double ahead) {
    return ref.curvature_at(std::min(len, init.s + ahead)) * 20.0;
  };
  return {ego.v / 10.0,       ego.a / 3.0,  target_speed / 10.0, init.l / 3.5,
          kappa_at(5.0),      kappa_at(15.0), kappa_at(25.0)};
}

GeneratorContext make_generator_context(const EgoState& ego, const ReferenceLine& ref,
                                        double target_speed) {
  GeneratorContext ctx;
  ctx.ego = ego;
  ctx.ref = ref;
  ctx.target_speed = target_speed;
  ctx.init = ego_frenet_state(ego, ctx.ref);
  ctx.lateral_span = std::max(10.0, ego.v * kHorizonSeconds + 5.0);
  return ctx;
}

ToyGenerator ToyGenerator::zeros(int latent_dim, int modes) {
  ToyGenerator gen;
  gen.latent_dim = latent_dim;
  gen.modes = modes;
  gen.weights.assign(static_cast<std::size_t>(kGeneratorOutputDim) *
                         (kConditioningDim + latent_dim),
                     0.0);
  gen.bias.fill(0.0);
  return gen;
}

ToyGenerator ToyGenerator::constant(const std::array<double, kGeneratorOutputDim>& out,
                                    int latent_dim) {
  ToyGenerator gen = zeros(latent_dim);
  gen.bias = out;
  return gen;
}

std::array<double, kGeneratorOutputDim> ToyGenerator::output(
    const GeneratorContext& ctx, const std::vector<double>& latent) const {
  if (static_cast<int>(latent.size()) != latent_dim) {
    throw std::invalid_argument("ToyGenerator: latent dimension mismatch");
  }
  const std::array<double, kConditioningDim> cond = ctx.conditioning();
  std::array<double, kGeneratorOutputDim> out = bias;
  const int in_dim = input_dim();
  for (int j = 0; j < kGeneratorOutputDim; ++j) {
    const double* row = weights.data() + static_cast<std::size_t>(j) * in_dim;
    double acc = 0.0;
    for (int c = 0; c < kConditioningDim; ++c) acc += row[c] * cond[static_cast<std::size_t>(c)];
    for (int c = 0; c < latent_dim; ++c) {
      acc += row[kConditioningDim + c] * latent[static_cast<std::size_t>(c)];
    }
    out[static_cast<std::size_t>(j)] += acc;
  }
  return out;
}

Trajectory ToyGenerator::decode(const GeneratorContext& ctx,
                                const std::vector<double>& latent) const {
  DecodeScratch scratch;
  decode_internal(*this, ctx, output(ctx, latent), false, &scratch);
  return std::move(scratch.traj);
}

double normal_sample(std::mt19937_64& rng) {
  // Box-Muller on explicit 53-bit uniforms; avoids the implementation-defined
  // std::normal_distribution.
  const double u1 =
      (static_cast<double>(rng() >> 11) + 1.0) / 9007199254740993.0;  // (0, 1]
  const double u2 = static_cast<double>(rng() >> 11) / 9007199254740992.0;  // [0, 1)
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::vector<double> draw_latent(int dim, std::mt19937_64& rng) {
  std::vector<double> m(static_cast<std::size_t>(dim));
  for (double& x : m) x = normal_sample(rng);
  return m;
}

CandidateSet sample_generator(const ToyGenerator& gen, const GeneratorContext& ctx, int draws,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CandidateSet set;
  for (int i = 0; i < draws; ++i) {
    set.add(gen.decode(ctx, draw_latent(gen.latent_dim, rng)));
  }
  return set;
}

EnergySample sample_energy(const CostModel& model, const FeaturePlanes& planes, const Vec2& p,
                           double t) {
  const SoftSample occ = sample_soft(planes.occ_cost, p);
  const SoftSample pred = sample_soft(planes.pred, p, t);
  const SoftSample route = sample_soft(planes.route_distance, p);
  const SoftSample lat = sample_soft(planes.lateral_offset, p);
  EnergySample out;
  const double w_occ = model.w_occ + model.alpha;
  const double w_pred = model.w_pred + model.beta;
  out.value = w_occ * occ.value + w_pred * pred.value + model.w_route * route.value +
              model.w_lat * lat.value + model.w_bias;
  out.ddx = w_occ * occ.ddx + w_pred * pred.ddx + model.w_route * route.ddx +
            model.w_lat * lat.ddx;
  out.ddy = w_occ * occ.ddy + w_pred * pred.ddy + model.w_route * route.ddy +
            model.w_lat * lat.ddy;
  return out;
}

namespace {

struct GeneratorGradient {
  std::vector<double> weights;
  std::array<double, kGeneratorOutputDim> bias{};

  explicit GeneratorGradient(const ToyGenerator& gen)
      : weights(gen.weights.size(), 0.0) {}

  void accumulate(const ToyGenerator& gen, const GeneratorContext& ctx,
                  const std::vector<double>& latent,
                  const std::array<double, kGeneratorOutputDim>& dloss_dout) {
    const std::array<double, kConditioningDim> cond = ctx.conditioning();
    const int in_dim = gen.input_dim();
    for (int j = 0; j < kGeneratorOutputDim; ++j) {
      const double g = dloss_dout[static_cast<std::size_t>(j)];
      bias[static_cast<std::size_t>(j)] += g;
      double* row = weights.data() + static_cast<std::size_t>(j) * in_dim;
      for (int c = 0; c < kConditioningDim; ++c) row[c] += g * cond[static_cast<std::size_t>(c)];
      for (int c = 0; c < gen.latent_dim; ++c) {
        row[kConditioningDim + c] += g * latent[static_cast<std::size_t>(c)];
      }
    }
  }
};

struct FrameDraws {
  std::vector<std::vector<double>> latents;
  std::vector<DecodeScratch> decoded;
  std::vector<std::array<double, kGeneratorOutputDim>> outputs;
};

// Generator loss over one frame: mean E over draws plus the multi-modal
// imitation loss; fills the parameter gradient.
double generator_frame_pass(const ToyGenerator& gen, const GanFrame& frame,
                            FrameDraws* draws, bool imitation_only, const CostModel& model,
                            GeneratorGradient* grad) {
  const int m = static_cast<int>(draws->latents.size());
  const double inv_m = 1.0 / static_cast<double>(m);
  const int steps = kHorizonSteps;

  // Decode all draws with jacobians.
  draws->decoded.resize(static_cast<std::size_t>(m));
  draws->outputs.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    draws->outputs[static_cast<std::size_t>(i)] =
        gen.output(frame.ctx, draws->latents[static_cast<std::size_t>(i)]);
    decode_internal(gen, frame.ctx, draws->outputs[static_cast<std::size_t>(i)], true,
                    &draws->decoded[static_cast<std::size_t>(i)]);
  }

  // Imitation: the closest mode only.
  int best_mode = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    double dist = 0.0;
    const Trajectory& traj = draws->decoded[static_cast<std::size_t>(i)].traj;
    for (int k = 0; k < steps; ++k) {
      dist += (traj.waypoints[static_cast<std::size_t>(k)].position() -
               frame.gt.waypoints[static_cast<std::size_t>(k)].position())
                  .norm();
    }
    dist /= steps;
    if (dist < best_dist) {
      best_dist = dist;
      best_mode = i;
    }
  }

  double loss = best_dist;
  for (int i = 0; i < m; ++i) {
    const DecodeScratch& dec = draws->decoded[static_cast<std::size_t>(i)];
    std::array<double, kGeneratorOutputDim> dloss_dout{};
    double energy_sum = 0.0;
    for (int k = 0; k < steps; ++k) {
      const Waypoint& wp = dec.traj.waypoints[static_cast<std::size_t>(k)];
      Vec2 dloss_dpos{0.0, 0.0};
      if (!imitation_only) {
        const EnergySample e = sample_energy(model, frame.planes, wp.position(), wp.t);
        energy_sum += e.value;
        dloss_dpos += Vec2{e.ddx, e.ddy} * inv_m;
      }
      if (i == best_mode) {
        const Vec2 delta =
            wp.position() - frame.gt.waypoints[static_cast<std::size_t>(k)].position();
        const double norm = std::max(delta.norm(), 1e-9);
        dloss_dpos += delta * (1.0 / (norm * steps));
      }
      const WaypointJacobian& jac = dec.jacobian[static_cast<std::size_t>(k)];
      for (int j = 0; j < kGeneratorOutputDim; ++j) {
        dloss_dout[static_cast<std::size_t>(j)] +=
            dloss_dpos.dot(jac.dpos[static_cast<std::size_t>(j)]);
      }
    }
    if (!imitation_only) loss += energy_sum * inv_m;
    grad->accumulate(gen, frame.ctx, draws->latents[static_cast<std::size_t>(i)], dloss_dout);
  }
  return loss;
}

}  // namespace

GanTrainResult train_gan_planner(const std::vector<GanFrame>& frames,
                                 const CostModel& evaluator_init, const GanConfig& config) {
  if (frames.empty()) throw std::invalid_argument("train_gan_planner: empty dataset");

  GanTrainResult result;
  result.evaluator = evaluator_init;
  std::mt19937_64 rng(config.seed);

  // Small random init so the latent channels are live from the start.
  result.generator = ToyGenerator::zeros(config.latent_dim, config.draws);
  for (double& w : result.generator.weights) w = config.init_scale * normal_sample(rng);

  const int total_epochs = config.pretrain_epochs + config.epochs;
  const double inv_frames = 1.0 / static_cast<double>(frames.size());
  FrameDraws draws;
  for (int epoch = 0; epoch < total_epochs; ++epoch) {
    const bool pretrain = epoch < config.pretrain_epochs;

    GeneratorGradient grad(result.generator);
    double gen_loss = 0.0;
    for (const GanFrame& frame : frames) {
      draws.latents.assign(static_cast<std::size_t>(config.draws), {});
      for (auto& m : draws.latents) m = draw_latent(config.latent_dim, rng);
      gen_loss += generator_frame_pass(result.generator, frame, &draws, pretrain,
                                       result.evaluator, &grad);
    }
    gen_loss *= inv_frames;
    for (std::size_t i = 0; i < result.generator.weights.size(); ++i) {
      result.generator.weights[i] -= config.lr_generator * grad.weights[i] * inv_frames;
    }
    for (int j = 0; j < kGeneratorOutputDim; ++j) {
      result.generator.bias[static_cast<std::size_t>(j)] -=
          config.lr_generator * grad.bias[static_cast<std::size_t>(j)] * inv_frames;
    }
    result.generator_loss_trace.push_back(gen_loss);

    // Evaluator step with the generator outputs among the candidates.
    double eval_loss = 0.0;
    std::array<double, 5> eval_grad{};
    for (const GanFrame& frame : frames) {
      CandidateSet candidates;
      for (int i = 0; i < config.draws; ++i) {
        candidates.add(result.generator.decode(frame.ctx, draw_latent(config.latent_dim, rng)));
      }
      const MaxMarginResult mm =
          max_margin_loss(result.evaluator, frame.planes, frame.gt, candidates);
      eval_loss += mm.loss;
      for (int j = 0; j < 5; ++j) eval_grad[static_cast<std::size_t>(j)] += mm.grad[j];
    }
    eval_loss *= inv_frames;
    if (!pretrain && config.lr_evaluator > 0.0) {
      std::array<double, 5> w = result.evaluator.weights();
      for (int j = 0; j < 5; ++j) {
        w[static_cast<std::size_t>(j)] -= config.lr_evaluator * eval_grad[static_cast<std::size_t>(j)] * inv_frames;
      }
      result.evaluator.set_weights(w);
    }
    result.evaluator_loss_trace.push_back(eval_loss);

    if (!std::isfinite(gen_loss) || !std::isfinite(eval_loss) ||
        gen_loss > config.divergence_threshold || eval_loss > config.divergence_threshold) {
      std::ostringstream os;
      os << "train_gan_planner: diverged at epoch " << epoch << " (generator " << gen_loss
         << ", evaluator " << eval_loss << ")";
      throw std::runtime_error(os.str());
    }
  }
  return result;
}

}  // namespace gridplan
