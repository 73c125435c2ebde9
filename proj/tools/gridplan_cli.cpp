#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gridplan/run_config.hpp"
#include "gridplan/scenario_bank.hpp"
#include "gridplan/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace gridplan;

namespace {

Scenario resolve_scenario(const std::string& spec) {
  constexpr const char* kBuiltinPrefix = "builtin:";
  if (spec.rfind(kBuiltinPrefix, 0) == 0) {
    return builtin_scenario(spec.substr(std::string(kBuiltinPrefix).size()));
  }
  return load_scenario(spec);
}

void apply_sampler_flags(PlannerSetup* setup, const std::string& samplers) {
  if (samplers.empty()) return;
  setup->samplers = SamplerToggles{false, false, false, false};
  std::stringstream ss(samplers);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "curve") {
      setup->samplers.curve = true;
    } else if (token == "retrieval") {
      setup->samplers.retrieval = true;
    } else if (token == "lattice") {
      setup->samplers.lattice = true;
    } else if (token == "generator" || token == "gan") {
      setup->samplers.generator = true;
    } else if (token == "none") {
      // leave everything off
    } else {
      throw std::runtime_error("unknown sampler: " + token);
    }
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void load_model_into(const std::string& model_path, RunConfig* config) {
  if (model_path.empty()) return;
  const LoadedModel loaded = load_model(model_path);
  config->setup.model = loaded.model;
  config->setup.generator = loaded.generator;
}

// First planning frame of a scenario (step 0).
PlanningFrame initial_frame(const Scenario& scenario) {
  const SimState state = init_sim(scenario);
  return frame_from_sim(state, scenario);
}

int cmd_simulate(const RunConfig& config, const std::string& scenario_spec) {
  const Scenario scenario = resolve_scenario(scenario_spec);
  const std::string hash = config_hash(config);
  const RunResult result = run_closed_loop(scenario, config.setup);

  fs::create_directories(config.output_dir);
  std::ostringstream trace;
  trace << "# config_hash=" << hash << "\n" << trace_csv_header() << "\n";
  for (const TraceRow& row : result.trace) trace << trace_row_csv(row) << "\n";
  const std::string trace_path =
      (fs::path(config.output_dir) / (scenario.name + "_trace.csv")).string();
  write_text(trace_path, trace.str());

  std::ostringstream metrics;
  metrics << "# config_hash=" << hash << "\n"
          << "scenario: " << scenario.name << "\n"
          << format_metrics(result.metrics);
  const std::string metrics_path =
      (fs::path(config.output_dir) / (scenario.name + "_metrics.txt")).string();
  write_text(metrics_path, metrics.str());

  std::cout << metrics.str();
  std::cout << "trace: " << trace_path << "\n";
  return 0;
}

int cmd_sample(const RunConfig& config, const std::string& scenario_spec,
               const std::string& source, const std::string& out_path,
               const std::string& db_path) {
  const Scenario scenario = resolve_scenario(scenario_spec);
  const PlanningFrame frame = initial_frame(scenario);
  const std::string hash = config_hash(config);

  CandidateSet set;
  if (source == "curve") {
    set = curve_sampler(frame.ego, config.setup.curve);
  } else if (source == "lattice") {
    const EvalContext ctx = build_eval_context(frame, config.setup.model,
                                               config.setup.features, config.setup.forecast);
    const ReferenceLine ref =
        route_reference_line(frame.route);
    const StGraph st =
        build_st_graph(ref, ctx.forecasts, frame.agents, 0.5 * frame.ego_length, config.setup.st);
    LatticeConfig lattice = config.setup.lattice;
    lattice.stop_s = scenario.stop_s;
    set = lattice_sampler(frame.ego, ref, st, frame.route.target_speed, lattice);
  } else if (source == "retrieval") {
    if (db_path.empty()) throw std::runtime_error("retrieval sampling needs --db");
    const ExpertTrajectoryDb db = ExpertTrajectoryDb::load(db_path);
    set = retrieval_sampler(frame.ego, db, config.setup.retrieval);
  } else if (source == "gan" || source == "generator") {
    if (!config.setup.generator) throw std::runtime_error("generator sampling needs --model");
    const ReferenceLine ref =
        route_reference_line(frame.route);
    const GeneratorContext gctx =
        make_generator_context(frame.ego, ref, frame.route.target_speed);
    set = sample_generator(*config.setup.generator, gctx, config.setup.generator_draws,
                           config.setup.seed);
  } else {
    throw std::runtime_error("unknown source: " + source);
  }

  const std::string text = candidate_set_to_json(set, hash);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_text(out_path, text);
    std::cout << "wrote " << set.size() << " candidates to " << out_path << "\n";
  }
  return 0;
}

int cmd_evaluate(const RunConfig& config, const std::string& scenario_spec,
                 const std::string& trajectory_path, const std::string& out_path) {
  const Scenario scenario = resolve_scenario(scenario_spec);
  const Trajectory traj = load_trajectory(trajectory_path);
  const std::vector<std::string> errors = validate_trajectory(traj);
  if (!errors.empty()) {
    std::cerr << "invalid trajectory:\n";
    for (const std::string& e : errors) std::cerr << "  - " << e << "\n";
    return 1;
  }
  const PlanningFrame frame = initial_frame(scenario);
  const EvalContext ctx = build_eval_context(frame, config.setup.model, config.setup.features,
                                             config.setup.forecast);
  const CostBreakdown breakdown = trajectory_cost(traj, ctx.volume, ctx.occ_cost, ctx.pred,
                                                  ctx.model.alpha, ctx.model.beta);
  std::ostringstream os;
  os << "# config_hash=" << config_hash(config) << "\n" << format_cost_breakdown(breakdown);
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    write_text(out_path, os.str());
    std::cout << os.str();
  }
  return 0;
}

int cmd_train_cost(RunConfig config, const std::string& out_path) {
  const std::string hash = config_hash(config);
  std::cout << "generating synthetic dataset (" << config.dataset.frames << " frames)...\n";
  const std::vector<LabeledFrame> dataset = generate_synthetic_dataset(config.dataset);
  const PlannerSetup harness = dataset_harness_setup();
  std::cout << "building margin frames...\n";
  const std::vector<MarginFrame> frames = build_margin_frames(dataset, harness);
  CostModel init;
  init.alpha = config.setup.model.alpha;
  init.beta = config.setup.model.beta;
  const CostTrainResult trained = train_cost_model(frames, init, config.cost_training);

  fs::create_directories(fs::path(out_path).parent_path().empty()
                             ? fs::path(".")
                             : fs::path(out_path).parent_path());
  save_model(out_path, trained.model, std::nullopt, hash);

  std::ostringstream trace;
  trace << "# config_hash=" << hash << "\nepoch,loss\n";
  for (std::size_t i = 0; i < trained.loss_trace.size(); ++i) {
    trace << i << ',' << trained.loss_trace[i] << "\n";
  }
  write_text(out_path + ".loss.csv", trace.str());

  std::cout << "final loss: " << trained.loss_trace.back() << "\n";
  const auto w = trained.model.weights();
  const auto& names = CostModel::feature_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::cout << "w[" << names[i] << "] = " << w[i] << "\n";
  }
  std::cout << "model: " << out_path << "\n";
  return 0;
}

int cmd_train_gan(RunConfig config, const std::string& model_in, const std::string& out_path) {
  load_model_into(model_in, &config);
  const std::string hash = config_hash(config);
  const CorridorScene scene = make_corridor_scene();
  const std::vector<GanFrame> frames{scene.gan_frame};
  const GanTrainResult result =
      train_gan_planner(frames, config.setup.model, config.gan_training);
  save_model(out_path, result.evaluator, result.generator, hash);
  std::cout << "generator loss: " << result.generator_loss_trace.back() << "\n"
            << "evaluator loss: " << result.evaluator_loss_trace.back() << "\n"
            << "model: " << out_path << "\n";
  return 0;
}

int cmd_build_expert_db(const RunConfig& config, const std::string& input_dir, int synthetic,
                        const std::string& out_path) {
  std::vector<Trajectory> raw;
  if (!input_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input_dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& file : files) raw.push_back(load_trajectory(file.string()));
  }
  if (synthetic > 0) {
    // Synthetic expert library: lattice trajectories over randomized frames.
    DatasetConfig dataset = config.dataset;
    dataset.frames = synthetic;
    for (const LabeledFrame& labeled : generate_synthetic_dataset(dataset)) {
      raw.push_back(labeled.gt);
    }
  }
  if (raw.empty()) throw std::runtime_error("build-expert-db: no input trajectories");
  const ExpertTrajectoryDb db = ExpertTrajectoryDb::build(raw);
  db.save(out_path);
  std::cout << "stored " << db.entries().size() << " representatives from " << raw.size()
            << " trajectories in " << out_path << "\n";
  return 0;
}

int cmd_metrics(const RunConfig& config, const std::string& trace_path) {
  std::ifstream in(trace_path);
  if (!in) throw std::runtime_error("cannot open trace: " + trace_path);
  std::vector<TraceRow> trace;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("step,", 0) == 0) continue;
    TraceRow row;
    std::stringstream ss(line);
    std::string field;
    auto next = [&ss, &field]() {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("short trace row");
      return field;
    };
    row.step = std::stoi(next());
    row.t = std::stod(next());
    row.x = std::stod(next());
    row.y = std::stod(next());
    row.heading = std::stod(next());
    row.v = std::stod(next());
    row.a_cmd = std::stod(next());
    row.phi_cmd = std::stod(next());
    const auto source = trajectory_source_from_string(next());
    row.source = source.value_or(TrajectorySource::kCurve);
    row.cost = std::stod(next());
    row.n_candidates = std::stoi(next());
    row.fallback = next() == "1";
    row.collision = next() == "1";
    row.deviation = next() == "1";
    row.lateral_error = std::stod(next());
    row.completed = next() == "1";
    trace.push_back(row);
  }
  const std::vector<SimEvent> derived = derive_trace_events(trace, config.setup.sim);
  const ClosedLoopMetrics metrics = compute_metrics(trace, derived, config.setup.sim);
  std::cout << format_metrics(metrics);
  return 0;
}

int cmd_export_raster(const RunConfig& config, const std::string& scenario_spec,
                      const std::string& out_dir, int pred_steps) {
  const Scenario scenario = resolve_scenario(scenario_spec);
  const PlanningFrame frame = initial_frame(scenario);
  const std::string hash = config_hash(config);

  const OccupancyGrid occ = build_occupancy(frame);
  SceneFrame scene;
  scene.ego = frame.ego;
  scene.ego_length = frame.ego_length;
  scene.ego_width = frame.ego_width;
  scene.agents = frame.agents;
  scene.landmarks = frame.landmarks;
  scene.static_obstacles = frame.static_obstacles;
  scene.occupancy = &occ;
  scene.route = frame.route;
  scene.traffic_light = frame.traffic_light;

  const GridGeometry raster_geom =
      GridGeometry::centered(frame.ego.position(), kDefaultRasterExtent, kDefaultResolution);
  const BevRaster raster = rasterize_scene(scene, raster_geom);

  fs::create_directories(out_dir);
  const char* channel_names[kRasterChannels] = {"landmarks", "agents", "ego", "static",
                                                "route"};
  for (int ch = 0; ch < kRasterChannels; ++ch) {
    const std::string base =
        (fs::path(out_dir) / (scenario.name + "_" + channel_names[ch])).string();
    const std::string comment = "config_hash=" + hash + " channel=" + channel_names[ch];
    write_pgm(base + ".pgm", raster.channels[ch], raster_geom.rows, raster_geom.cols, comment);
    write_grid_csv(base + ".csv", raster.channels[ch], raster_geom.rows, raster_geom.cols,
                   comment);
  }

  if (pred_steps > 0) {
    const EvalContext ctx = build_eval_context(frame, config.setup.model,
                                               config.setup.features, config.setup.forecast);
    for (int t = 0; t < std::min(pred_steps, ctx.pred.steps); ++t) {
      const std::string base =
          (fs::path(out_dir) / (scenario.name + "_pred_t" + std::to_string(t))).string();
      std::vector<float> slice(ctx.pred.data.begin() + static_cast<std::ptrdiff_t>(ctx.pred.index(t, 0, 0)),
                               ctx.pred.data.begin() + static_cast<std::ptrdiff_t>(ctx.pred.index(t, 0, 0)) +
                                   static_cast<std::ptrdiff_t>(ctx.pred.geom.cell_count()));
      write_pgm(base + ".pgm", slice, ctx.pred.geom.rows, ctx.pred.geom.cols,
                "config_hash=" + hash + " t=" + std::to_string(t));
    }
  }
  std::cout << "rasters written to " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HD-map-free prediction-planning stack"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario_spec;
  std::string samplers;
  std::string model_path;
  std::string out_path;
  std::string output_dir;
  std::string db_path;
  std::string trajectory_path;
  std::string trace_path;
  std::string input_dir;
  int synthetic = 0;
  int pred_steps = 0;

  app.add_option("--config", config_path, "run config JSON file")->check(CLI::ExistingFile);

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--samplers", samplers, "comma list: curve,retrieval,lattice,gan,none");
    cmd->add_option("--model", model_path, "model JSON file");
    cmd->add_option("--out-dir", output_dir, "output directory");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop run over a scenario");
  simulate->add_option("--scenario", scenario_spec, "scenario file or builtin:<name>")
      ->required();
  add_common(simulate);

  CLI::App* sample = app.add_subcommand("sample", "run one sampler on a scenario's first frame");
  sample->add_option("--scenario", scenario_spec)->required();
  sample->add_option("--source", samplers, "curve | retrieval | lattice | gan")->required();
  sample->add_option("--out", out_path, "output JSON path (stdout when omitted)");
  sample->add_option("--db", db_path, "expert db for retrieval");
  sample->add_option("--model", model_path, "model JSON file");

  CLI::App* evaluate = app.add_subcommand("evaluate", "cost breakdown of a trajectory file");
  evaluate->add_option("--scenario", scenario_spec)->required();
  evaluate->add_option("--trajectory", trajectory_path)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model", model_path, "model JSON file");
  evaluate->add_option("--out", out_path, "also write the breakdown here");

  CLI::App* train_cost = app.add_subcommand("train-cost", "max-margin cost model training");
  train_cost->add_option("--out", out_path, "output model path")->required();

  CLI::App* train_gan = app.add_subcommand("train-gan", "generative planner training");
  train_gan->add_option("--model", model_path, "trained evaluator model")->required();
  train_gan->add_option("--out", out_path, "output model path")->required();

  CLI::App* build_db = app.add_subcommand("build-expert-db", "expert trajectory database");
  build_db->add_option("--input", input_dir, "directory of trajectory JSON files");
  build_db->add_option("--synthetic", synthetic, "generate N synthetic expert trajectories");
  build_db->add_option("--out", out_path, "output db path")->required();

  CLI::App* metrics = app.add_subcommand("metrics", "recompute metrics from a trace CSV");
  metrics->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);

  CLI::App* export_raster = app.add_subcommand("export-raster", "BEV raster graymaps/CSV");
  export_raster->add_option("--scenario", scenario_spec)->required();
  export_raster->add_option("--out-dir", output_dir, "output directory")->required();
  export_raster->add_option("--pred-steps", pred_steps, "also export N prediction timesteps");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig config;
    if (!config_path.empty()) config = load_run_config(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;

    if (app.got_subcommand(simulate)) {
      load_model_into(model_path, &config);
      apply_sampler_flags(&config.setup, samplers);
      return cmd_simulate(config, scenario_spec);
    }
    if (app.got_subcommand(sample)) {
      load_model_into(model_path, &config);
      return cmd_sample(config, scenario_spec, samplers, out_path, db_path);
    }
    if (app.got_subcommand(evaluate)) {
      load_model_into(model_path, &config);
      return cmd_evaluate(config, scenario_spec, trajectory_path, out_path);
    }
    if (app.got_subcommand(train_cost)) return cmd_train_cost(config, out_path);
    if (app.got_subcommand(train_gan)) return cmd_train_gan(config, model_path, out_path);
    if (app.got_subcommand(build_db)) {
      return cmd_build_expert_db(config, input_dir, synthetic, out_path);
    }
    if (app.got_subcommand(metrics)) return cmd_metrics(config, trace_path);
    if (app.got_subcommand(export_raster)) {
      return cmd_export_raster(config, scenario_spec, config.output_dir, pred_steps);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
