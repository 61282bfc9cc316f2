// Command-line front end: oracle solves, PINN training, model-vs-oracle
// comparison, and the parametric-surrogate workflow, each leaving a JSON
// manifest beside its artifacts so any output can be regenerated from
// (config, seed, command, version).
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "curepinn/config.hpp"
#include "curepinn/errors.hpp"
#include "curepinn/oracle.hpp"
#include "curepinn/pinn.hpp"
#include "curepinn/surrogate.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace curepinn;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string default_out_dir() {
  const char* env = std::getenv("CUREPINN_OUT");
  return env && *env ? env : ".";
}

/// Options shared by every subcommand that loads a problem description.
struct ConfigSource {
  std::string config_path;
  std::string preset;

  void add_flags(CLI::App* cmd) {
    auto* cfg = cmd->add_option("--config", config_path,
                                "Path to a key = value config file");
    auto* pre = cmd->add_option("--preset", preset,
                                "Built-in configuration name (case1..case4, "
                                "case1a, case3a)");
    cfg->excludes(pre);
    pre->excludes(cfg);
  }

  ProblemConfig load() const {
    if (!config_path.empty()) return load_config_file(config_path);
    if (!preset.empty()) return preset_config(preset);
    throw ConfigError("one of --config or --preset is required");
  }

  std::string description() const {
    return !config_path.empty() ? config_path : "preset:" + preset;
  }
};

/// Manifest written before the run starts and finalized when it ends, so a
/// crash leaves a visible "running" record instead of silence.
class ManifestWriter {
 public:
  ManifestWriter(const fs::path& dir, const std::string& command,
                 const ConfigSource& src, const ProblemConfig& cfg,
                 std::uint64_t seed)
      : path_(dir / "manifest.json") {
    j_["command"] = command;
    j_["config"] = src.description();
    j_["config_hash"] = config_hash(cfg);
    j_["config_text"] = dump_config(cfg);
    j_["seed"] = seed;
    j_["out_dir"] = dir.string();
    j_["version"] = kVersion;
    j_["started_at"] = iso_now();
    j_["status"] = "running";
    flush();
  }

  json& extra() { return j_; }

  void finalize(const std::string& status) {
    j_["finished_at"] = iso_now();
    j_["status"] = status;
    flush();
  }

 private:
  void flush() const {
    std::ofstream out(path_);
    if (!out) throw ArtifactError("cannot write manifest: " + path_.string());
    out << j_.dump(2) << "\n";
  }

  fs::path path_;
  json j_;
};

json read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in)
    throw ArtifactError("no manifest.json in " + dir.string());
  json j;
  in >> j;
  return j;
}

ProblemConfig config_from_manifest(const json& manifest) {
  if (!manifest.contains("config_text"))
    throw ArtifactError("manifest lacks the embedded config text");
  return parse_config_text(manifest["config_text"].get<std::string>());
}

GridSpec grid_from_flags(int grid_nodes, int time_steps) {
  GridSpec g;
  if (grid_nodes < 5 || grid_nodes % 2 == 0)
    throw ConfigError(
        "--grid-nodes must be an odd count >= 5 (nodes split evenly into two "
        "regions around the shared interface node)");
  g.cells_tool = (grid_nodes - 1) / 2;
  g.cells_comp = (grid_nodes - 1) / 2;
  if (time_steps < 1) throw ConfigError("--time-steps must be positive");
  g.time_steps = time_steps;
  return g;
}

struct ScheduleFlags {
  int iterations = 10;
  int epochs = 30;
  int batch = 512;
  double lr0 = 1e-3;
  int grid_nodes = 500;   // interior collocation x-count
  int time_steps = 1000;  // interior collocation t-count
  bool constant_weights = false;
  bool raw_weights = false;
  double early_stop_loss = 0.0;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--iterations", iterations,
                    "Outer iterations (alpha phase + T phase each)");
    cmd->add_option("--epochs", epochs, "Epochs per network per iteration");
    cmd->add_option("--batch", batch, "Mini-batch size over interior points");
    cmd->add_option("--lr0", lr0, "Initial Adam learning rate");
    cmd->add_option("--grid-nodes", grid_nodes,
                    "Interior collocation points along x");
    cmd->add_option("--time-steps", time_steps,
                    "Interior collocation points along t");
    cmd->add_flag("--constant-weights", constant_weights,
                  "Freeze loss weights at their starting values "
                  "(no adaptive refresh; ablation mode)");
    cmd->add_flag("--raw-weights", raw_weights,
                  "Start every loss weight at 1 instead of the unit-rational "
                  "scaling (interface flux and convective terms carry large "
                  "physical-unit factors)");
    cmd->add_option("--early-stop-loss", early_stop_loss,
                    "Stop once the weighted probe total drops below this");
  }

  TrainSchedule to_schedule(const ProblemConfig& cfg) const {
    TrainSchedule s;
    s.iterations = iterations;
    s.epochs_per_net = epochs;
    s.batch = batch;
    s.lr0 = lr0;
    s.colloc.nx = grid_nodes;
    s.colloc.nt = time_steps;
    s.adaptive_weights = !constant_weights;
    if (!raw_weights) s.start_weights = scale_rational_weights(cfg);
    s.early_stop_total = early_stop_loss;
    return s;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ArtifactError("cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// solve-oracle

int cmd_solve_oracle(const ConfigSource& src, std::uint64_t seed,
                     const std::string& out, int grid_nodes, int time_steps) {
  const ProblemConfig cfg = src.load();
  const GridSpec grid = grid_from_flags(grid_nodes, time_steps);
  fs::create_directories(out);
  ManifestWriter manifest(out, "solve-oracle", src, cfg, seed);
  manifest.extra()["grid_nodes"] = grid_nodes;
  manifest.extra()["time_steps"] = time_steps;

  const FieldGrid fields = solve_fd(cfg, grid);
  write_field_csv((fs::path(out) / "fields.csv").string(), fields);
  manifest.finalize("ok");
  std::cout << "wrote " << (fs::path(out) / "fields.csv").string() << " ("
            << fields.nx() << " nodes x " << fields.nt() << " times)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train

int cmd_train(const ConfigSource& src, std::uint64_t seed,
              const std::string& out, const ScheduleFlags& flags,
              const std::string& warm_stem) {
  const ProblemConfig cfg = src.load();
  const TrainSchedule schedule = flags.to_schedule(cfg);
  fs::create_directories(out);
  ManifestWriter manifest(out, "train", src, cfg, seed);
  manifest.extra()["iterations"] = schedule.iterations;
  manifest.extra()["epochs_per_net"] = schedule.epochs_per_net;
  manifest.extra()["batch"] = schedule.batch;
  manifest.extra()["lr0"] = schedule.lr0;
  manifest.extra()["adaptive_weights"] = schedule.adaptive_weights;
  manifest.extra()["start_weights"] =
      flags.raw_weights ? "raw" : "unit-rational";
  if (!warm_stem.empty()) manifest.extra()["warm_start"] = warm_stem;

  TrainResult result;
  PinnModel model;
  try {
    if (!warm_stem.empty()) {
      const fs::path stem(warm_stem);
      model = load_pinn(stem.parent_path().string(), stem.filename().string(),
                        cfg);
      result = train_model(model, schedule, seed);
    } else {
      model = train_sequential(cfg, schedule, seed, &result);
    }
  } catch (...) {
    manifest.finalize("error");
    throw;
  }

  save_pinn(model, out, "model");
  write_history_csv((fs::path(out) / "history.csv").string(), result.history,
                    result.has_data_terms);
  manifest.extra()["epochs_run"] = result.history.size();
  manifest.extra()["stopped_early"] = result.stopped_early;
  if (!result.history.empty())
    manifest.extra()["final_probe_total"] =
        weighted_total(result.history.back().losses, result.final_weights);
  manifest.finalize("ok");
  std::cout << "trained " << result.history.size() << " epochs; checkpoints "
            << (fs::path(out) / "model_*.ckpt").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// compare

struct FieldErrors {
  double max_abs_T = 0.0, mean_abs_T = 0.0, max_rel_T = 0.0;
  double max_abs_alpha = 0.0, mean_abs_alpha = 0.0;
};

FieldErrors field_errors(const FieldGrid& model, const FieldGrid& oracle) {
  FieldErrors e;
  double sum_T = 0.0, sum_a = 0.0;
  std::size_t n_T = 0, n_a = 0;
  for (int i = 0; i < oracle.nx(); ++i)
    for (int j = 0; j < oracle.nt(); ++j) {
      const double dT = std::fabs(model.T(i, j) - oracle.T(i, j));
      e.max_abs_T = std::max(e.max_abs_T, dT);
      e.max_rel_T = std::max(e.max_rel_T, dT / oracle.T(i, j));
      sum_T += dT;
      ++n_T;
      if (std::isfinite(oracle.alpha(i, j)) &&
          std::isfinite(model.alpha(i, j))) {
        const double da = std::fabs(model.alpha(i, j) - oracle.alpha(i, j));
        e.max_abs_alpha = std::max(e.max_abs_alpha, da);
        sum_a += da;
        ++n_a;
      }
    }
  e.mean_abs_T = sum_T / static_cast<double>(n_T);
  e.mean_abs_alpha = n_a ? sum_a / static_cast<double>(n_a) : 0.0;
  return e;
}

int cmd_compare(const std::string& model_dir, const std::string& oracle_dir,
                const std::string& out) {
  const json model_manifest = read_manifest(model_dir);
  const json oracle_manifest = read_manifest(oracle_dir);
  const std::string mh = model_manifest.value("config_hash", "");
  const std::string oh = oracle_manifest.value("config_hash", "");
  if (mh.empty() || oh.empty() || mh != oh)
    throw ArtifactError("config hashes disagree between model (" + mh +
                        ") and oracle (" + oh + ") manifests");

  const ProblemConfig cfg = config_from_manifest(model_manifest);
  const PinnModel model = load_pinn(model_dir, "model", cfg);
  const FieldGrid oracle =
      read_field_csv((fs::path(oracle_dir) / "fields.csv").string());

  std::optional<double> zeta;
  if (model.norm.has_zeta) zeta = cfg.bc.h_t;  // evaluate at the config's h_t

  const FieldGrid fields = sample_model_grid(model, oracle.x, oracle.t, zeta);
  const FieldErrors err = field_errors(fields, oracle);

  fs::create_directories(out);

  // Pointwise error and residual maps over the oracle grid.
  {
    std::ostringstream csv;
    csv.precision(17);
    csv << "x_m,t_s,abs_dT_K,abs_dalpha,res_T,res_alpha\n";
    for (int j = 0; j < oracle.nt(); ++j)
      for (int i = 0; i < oracle.nx(); ++i) {
        const double x = oracle.x[static_cast<std::size_t>(i)];
        const double t = oracle.t[static_cast<std::size_t>(j)];
        const double dT = std::fabs(fields.T(i, j) - oracle.T(i, j));
        const bool comp = i >= oracle.interface_node;
        const double da =
            comp && std::isfinite(oracle.alpha(i, j))
                ? std::fabs(fields.alpha(i, j) - oracle.alpha(i, j))
                : std::nan("");
        const double rT = residual_temperature(model, x, t, zeta);
        const double ra = comp ? residual_alpha(model, x, t, zeta)
                               : std::nan("");
        csv << x << ',' << t << ',' << dT << ',' << da << ',' << rT << ','
            << ra << "\n";
      }
    write_text(fs::path(out) / "errors.csv", csv.str());
  }

  const ThermalLag lag_m = thermal_lag(model, zeta);
  const ThermalLag lag_o = thermal_lag(oracle, cfg);
  const Exotherm exo_m = exotherm(fields);
  const Exotherm exo_o = exotherm(oracle);

  std::ostringstream summary;
  summary.precision(6);
  summary << "temperature: max |dT| = " << err.max_abs_T
          << " K, mean |dT| = " << err.mean_abs_T
          << " K, max relative = " << err.max_rel_T * 100.0 << " %\n"
          << "degree of cure: max |da| = " << err.max_abs_alpha
          << ", mean |da| = " << err.mean_abs_alpha << "\n"
          << "thermal lag: model " << lag_m.lag_K << " K at t = "
          << lag_m.t_at_max << " s; oracle " << lag_o.lag_K << " K at t = "
          << lag_o.t_at_max << " s\n"
          << "exotherm: model " << exo_m.T_max << " K at (x = " << exo_m.x_at
          << " m, t = " << exo_m.t_at << " s); oracle " << exo_o.T_max
          << " K at (x = " << exo_o.x_at << " m, t = " << exo_o.t_at
          << " s)\n";
  write_text(fs::path(out) / "summary.txt", summary.str());
  std::cout << summary.str();

  json metrics;
  metrics["max_abs_dT_K"] = err.max_abs_T;
  metrics["mean_abs_dT_K"] = err.mean_abs_T;
  metrics["max_rel_dT"] = err.max_rel_T;
  metrics["max_abs_dalpha"] = err.max_abs_alpha;
  metrics["mean_abs_dalpha"] = err.mean_abs_alpha;
  metrics["thermal_lag_model_K"] = lag_m.lag_K;
  metrics["thermal_lag_oracle_K"] = lag_o.lag_K;
  metrics["exotherm_model_K"] = exo_m.T_max;
  metrics["exotherm_oracle_K"] = exo_o.T_max;
  write_text(fs::path(out) / "metrics.json", metrics.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// surrogate

int cmd_surrogate_train(const ConfigSource& src, std::uint64_t seed,
                        const std::string& out, const ScheduleFlags& flags,
                        double zeta_min, double zeta_max,
                        const std::vector<double>& anchors, int labels,
                        int label_grid_nodes, int label_time_steps) {
  const ProblemConfig cfg = src.load();
  SurrogateRange range;
  range.min = zeta_min;
  range.max = zeta_max;
  range.anchors = anchors;
  validate_surrogate_range(range);

  fs::create_directories(out);
  ManifestWriter manifest(out, "surrogate-train", src, cfg, seed);
  manifest.extra()["zeta_min"] = zeta_min;
  manifest.extra()["zeta_max"] = zeta_max;
  manifest.extra()["anchors"] = anchors;
  manifest.extra()["labels_per_anchor"] = labels;

  LabeledDataset data;
  if (labels > 0)
    data = generate_labeled_data(
        cfg, range, grid_from_flags(label_grid_nodes, label_time_steps),
        labels, seed);

  TrainResult result;
  PinnModel model;
  try {
    model = train_surrogate(cfg, range, data, flags.to_schedule(cfg), seed,
                            &result);
  } catch (...) {
    manifest.finalize("error");
    throw;
  }

  save_pinn(model, out, "model");
  write_history_csv((fs::path(out) / "history.csv").string(), result.history,
                    result.has_data_terms);
  manifest.extra()["epochs_run"] = result.history.size();
  manifest.extra()["labeled_points"] = data.points.size();
  manifest.finalize("ok");
  std::cout << "trained surrogate over zeta in [" << zeta_min << ", "
            << zeta_max << "] with " << data.points.size()
            << " labeled points\n";
  return 0;
}

int cmd_surrogate_eval(const std::string& model_dir, double x, double t,
                       double zeta) {
  const json manifest = read_manifest(model_dir);
  const ProblemConfig cfg = config_from_manifest(manifest);
  const PinnModel model = load_pinn(model_dir, "model", cfg);
  if (!model.norm.has_zeta)
    throw ArtifactError("checkpoint in " + model_dir +
                        " is not a parametric surrogate");
  const SurrogateEval e = eval_surrogate(model, x, t, zeta);
  if (e.extrapolated)
    std::cerr << "warning: zeta " << zeta << " outside the trained range ["
              << model.norm.zeta_min << ", " << model.norm.zeta_max << "]\n";
  std::cout.precision(17);
  std::cout << e.T << " " << e.alpha << "\n";
  return 0;
}

int cmd_surrogate_sweep(const std::string& model_dir,
                        const std::vector<double>& zetas,
                        const std::string& out, int grid_nodes,
                        int time_steps) {
  if (zetas.empty()) throw ConfigError("--zeta is required at least once");
  const json model_manifest = read_manifest(model_dir);
  const ProblemConfig cfg = config_from_manifest(model_manifest);
  const PinnModel model = load_pinn(model_dir, "model", cfg);
  if (!model.norm.has_zeta)
    throw ArtifactError("checkpoint in " + model_dir +
                        " is not a parametric surrogate");
  const GridSpec grid = grid_from_flags(grid_nodes, time_steps);

  fs::create_directories(out);
  std::ostringstream fields_csv, summary_csv;
  fields_csv.precision(17);
  summary_csv.precision(17);
  fields_csv << "zeta,x_m,t_s,T_K,alpha\n";
  summary_csv << "zeta,mean_abs_dT_K,mean_abs_dalpha,max_abs_dT_K,"
                 "max_abs_dalpha\n";

  for (double z : zetas) {
    ProblemConfig at = cfg;
    at.bc.h_t = z;
    const FieldGrid oracle = solve_fd(at, grid);
    const FieldGrid fields = sample_model_grid(model, oracle.x, oracle.t, z);
    for (int j = 0; j < fields.nt(); ++j)
      for (int i = 0; i < fields.nx(); ++i)
        fields_csv << z << ',' << fields.x[static_cast<std::size_t>(i)] << ','
                   << fields.t[static_cast<std::size_t>(j)] << ','
                   << fields.T(i, j) << ',' << fields.alpha(i, j) << "\n";
    const FieldErrors e = field_errors(fields, oracle);
    summary_csv << z << ',' << e.mean_abs_T << ',' << e.mean_abs_alpha << ','
                << e.max_abs_T << ',' << e.max_abs_alpha << "\n";
  }
  write_text(fs::path(out) / "sweep_fields.csv", fields_csv.str());
  write_text(fs::path(out) / "sweep_summary.csv", summary_csv.str());
  std::cout << "swept " << zetas.size() << " zeta values; summaries in "
            << (fs::path(out) / "sweep_summary.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled heat-conduction / resin-cure PINN toolkit"};
  app.require_subcommand(1);

  // solve-oracle ------------------------------------------------------------
  auto* solve = app.add_subcommand(
      "solve-oracle", "Finite-difference solve of the coupled system");
  ConfigSource solve_src;
  solve_src.add_flags(solve);
  std::uint64_t solve_seed = 0;
  std::string solve_out = default_out_dir();
  int solve_nodes = 65, solve_steps = 4000;
  solve->add_option("--seed", solve_seed, "Recorded in the manifest");
  solve->add_option("--out", solve_out, "Output directory");
  solve->add_option("--grid-nodes", solve_nodes, "Total spatial nodes (odd)");
  solve->add_option("--time-steps", solve_steps, "Time steps");

  // train ---------------------------------------------------------------
  auto* train = app.add_subcommand("train", "Train the bi-material PINN");
  ConfigSource train_src;
  train_src.add_flags(train);
  std::uint64_t train_seed = 0;
  std::string train_out = default_out_dir();
  std::string warm_stem;
  ScheduleFlags train_flags;
  train->add_option("--seed", train_seed, "Initialization and batching seed");
  train->add_option("--out", train_out, "Output directory");
  train_flags.add_flags(train);
  train->add_option("--warm-start", warm_stem,
                    "Checkpoint stem (dir/stem) to start from");

  // compare -----------------------------------------------------------------
  auto* compare = app.add_subcommand(
      "compare", "Error report of a trained model against oracle fields");
  std::string cmp_model, cmp_oracle, cmp_out = default_out_dir();
  compare->add_option("--model", cmp_model, "Directory of a train run")
      ->required();
  compare->add_option("--oracle", cmp_oracle,
                      "Directory of a solve-oracle run")
      ->required();
  compare->add_option("--out", cmp_out, "Output directory");

  // surrogate -----------------------------------------------------------
  auto* surrogate = app.add_subcommand(
      "surrogate", "Parametric-surrogate training, evaluation, and sweeps");
  surrogate->require_subcommand(1);

  auto* s_train = surrogate->add_subcommand(
      "train", "Train with the film coefficient as an extra input");
  ConfigSource s_src;
  s_src.add_flags(s_train);
  std::uint64_t s_seed = 0;
  std::string s_out = default_out_dir();
  ScheduleFlags s_flags;
  double zeta_min = 40.0, zeta_max = 80.0;
  std::vector<double> anchors = {50.0, 60.0, 70.0};
  int labels = 2000, label_nodes = 65, label_steps = 4000;
  s_train->add_option("--seed", s_seed, "Initialization and batching seed");
  s_train->add_option("--out", s_out, "Output directory");
  s_flags.add_flags(s_train);
  s_train->add_option("--zeta-min", zeta_min, "Lower end of the zeta range");
  s_train->add_option("--zeta-max", zeta_max, "Upper end of the zeta range");
  s_train->add_option("--anchor", anchors,
                      "Labeled-data anchor values (repeatable)");
  s_train->add_option("--labels", labels,
                      "Labeled points per anchor (0 = physics only)");
  s_train->add_option("--label-grid-nodes", label_nodes,
                      "Oracle nodes for label generation");
  s_train->add_option("--label-time-steps", label_steps,
                      "Oracle time steps for label generation");

  auto* s_eval =
      surrogate->add_subcommand("eval", "One (x, t, zeta) evaluation");
  std::string eval_model;
  double eval_x = 0.0, eval_t = 0.0, eval_zeta = 0.0;
  s_eval->add_option("--model", eval_model, "Directory of a surrogate run")
      ->required();
  s_eval->add_option("--x", eval_x, "Position [m]")->required();
  s_eval->add_option("--t", eval_t, "Time [s]")->required();
  s_eval->add_option("--zeta", eval_zeta, "Film coefficient [W/m^2K]")
      ->required();

  auto* s_sweep = surrogate->add_subcommand(
      "sweep", "Per-zeta oracle comparison and field export");
  std::string sweep_model, sweep_out = default_out_dir();
  std::vector<double> sweep_zetas;
  int sweep_nodes = 65, sweep_steps = 4000;
  s_sweep->add_option("--model", sweep_model, "Directory of a surrogate run")
      ->required();
  s_sweep->add_option("--zeta", sweep_zetas,
                      "Film coefficient to evaluate (repeatable)");
  s_sweep->add_option("--out", sweep_out, "Output directory");
  s_sweep->add_option("--grid-nodes", sweep_nodes,
                      "Oracle nodes per comparison");
  s_sweep->add_option("--time-steps", sweep_steps,
                      "Oracle time steps per comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed())
      return cmd_solve_oracle(solve_src, solve_seed, solve_out, solve_nodes,
                              solve_steps);
    if (train->parsed())
      return cmd_train(train_src, train_seed, train_out, train_flags,
                       warm_stem);
    if (compare->parsed()) return cmd_compare(cmp_model, cmp_oracle, cmp_out);
    if (surrogate->parsed()) {
      if (s_train->parsed())
        return cmd_surrogate_train(s_src, s_seed, s_out, s_flags, zeta_min,
                                   zeta_max, anchors, labels, label_nodes,
                                   label_steps);
      if (s_eval->parsed())
        return cmd_surrogate_eval(eval_model, eval_x, eval_t, eval_zeta);
      if (s_sweep->parsed())
        return cmd_surrogate_sweep(sweep_model, sweep_zetas, sweep_out,
                                   sweep_nodes, sweep_steps);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericsError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const ArtifactError& e) {
    std::cerr << "artifact error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
