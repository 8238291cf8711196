// Command-line front end: analytical curves, single engine runs, and sweeps.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bsf/config.hpp"
#include "bsf/harness.hpp"
#include "bsf/live_engine.hpp"
#include "bsf/serialize.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitEngine = 3;

struct Overrides {
  std::optional<std::string> engine;
  std::optional<std::string> mode;
  std::optional<int> iterations;
  std::optional<double> time_scale;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--engine", engine, "Engine: virtual or live")
        ->check(CLI::IsMember({"virtual", "live"}));
    cmd.add_option("--mode", mode, "Latency mode of the virtual engine")
        ->check(CLI::IsMember({"serialized", "pipelined"}));
    cmd.add_option("--iterations", iterations, "Iterations per run");
    cmd.add_option("--time-scale", time_scale, "Multiplier applied to every time parameter");
    cmd.add_option("--seed", seed, "Payload seed");
  }

  void apply(bsf::CliConfigFile& file) const {
    if (engine) file.run.engine = engine;
    if (mode) file.run.latency_mode = mode;
    if (iterations) file.run.iterations = iterations;
    if (time_scale) file.run.time_scale = time_scale;
    if (seed) file.run.seed = seed;
  }
};

// A path, or the name of a bundled config.
bsf::CliConfigFile load_config(const std::string& name) {
  fs::path path(name);
  if (!fs::exists(path)) {
    const fs::path bundled = fs::path(BSF_CONFIG_DIR) / (name + ".json");
    if (path.extension().empty() && fs::exists(bundled)) path = bundled;
  }
  if (!fs::exists(path)) throw bsf::ValidationError("config not found: '" + name + "'");
  return bsf::CliConfigFile::load(path);
}

// Writes to `out` when set, stdout otherwise.
void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out);
  if (!file) throw bsf::ValidationError("cannot write '" + out + "'");
  file << text;
}

struct AnalyzeArgs {
  std::string config;
  std::vector<int> k_values;
  std::optional<double> latency, t_s, t_r, t_p, t_w;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& args) {
  bsf::CliConfigFile file;
  if (!args.config.empty()) file = load_config(args.config);
  if (args.latency) file.params.latency = args.latency;
  if (args.t_s) file.params.t_s = args.t_s;
  if (args.t_r) file.params.t_r = args.t_r;
  if (args.t_p) file.params.t_p = args.t_p;
  if (args.t_w) file.params.t_w = args.t_w;

  std::vector<int> ks = args.k_values;
  if (ks.empty() && file.sweep.k_values) ks = *file.sweep.k_values;
  if (ks.empty() && file.params.k) ks = {*file.params.k};
  if (ks.empty()) {
    for (int k = 1; k <= 350; k += 10) ks.push_back(k);
  }
  file.params.k.reset();
  const bsf::BsfParams base = bsf::to_params(file);
  for (int k : ks) {
    if (k < 1) throw bsf::ValidationError("k values must be >= 1");
  }

  std::string bound;
  if (2.0 * base.latency + base.send_time > 0.0) {
    bound = bsf::format_number(bsf::scalability_bound(base));
  }
  std::ostringstream csv;
  csv << "K,speedup,efficiency_exact,efficiency_approx,bound\n";
  for (int k : ks) {
    const bsf::BsfParams p = base.with_slaves(k);
    csv << k << ',' << bsf::format_number(bsf::speedup(p)) << ','
        << bsf::format_number(bsf::efficiency_exact(p)) << ','
        << bsf::format_number(bsf::efficiency_approx(p)) << ',' << bound << '\n';
  }
  emit(csv.str(), args.out);
  return 0;
}

int cmd_simulate(const std::string& config, const Overrides& overrides, const std::string& out) {
  bsf::CliConfigFile file = load_config(config);
  overrides.apply(file);

  bsf::SimulationResult result;
  if (bsf::engine_of(file) == bsf::Engine::Virtual) {
    result = bsf::run_virtual(bsf::to_run_spec(file));
  } else {
    const double scale = file.run.time_scale.value_or(1.0);
    if (!(scale > 0.0)) throw bsf::ValidationError("run.time_scale: must be > 0");
    const bsf::BsfParams params = bsf::to_params(file).scaled(scale);
    if (const auto cap = bsf::max_workers_from_env(); cap && params.slaves > *cap) {
      throw bsf::EngineError("k = " + std::to_string(params.slaves) +
                             " exceeds BSF_MAX_WORKERS = " + std::to_string(*cap));
    }
    const bsf::TransferModel transfer = bsf::calibrate_transfer_model(21);
    result = bsf::run_live(bsf::live_spec_from_params(params, file.run.iterations.value_or(10),
                                                      file.run.seed.value_or(1), transfer));
  }
  emit(bsf::to_json(result).dump(2) + "\n", out);
  return 0;
}

int cmd_experiment(const std::string& config, const Overrides& overrides, const std::string& out,
                   bool quiet) {
  bsf::CliConfigFile file = load_config(config);
  overrides.apply(file);
  const bsf::ExperimentConfig experiment = bsf::to_experiment(file);

  bsf::ExperimentHooks hooks;
  if (!quiet) hooks.progress = [](const std::string& msg) { std::cerr << "[bsf] " << msg << '\n'; };
  const auto rows = bsf::run_experiment(experiment, std::move(hooks));

  const fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  const fs::path csv_path = dir / (experiment.name + ".csv");
  const fs::path json_path = dir / (experiment.name + ".json");
  {
    std::ofstream csv(csv_path);
    if (!csv) throw bsf::ValidationError("cannot write '" + csv_path.string() + "'");
    bsf::write_csv(csv, rows);
  }
  {
    std::ofstream js(json_path);
    if (!js) throw bsf::ValidationError("cannot write '" + json_path.string() + "'");
    js << bsf::experiment_bundle(experiment, rows).dump(2) << '\n';
  }
  for (const auto& s : bsf::error_summary(rows)) {
    std::cout << bsf::to_string(experiment.kind) << " control=" << bsf::format_number(s.control)
              << " max_rel_error=" << bsf::format_number(s.max)
              << " mean_rel_error=" << bsf::format_number(s.mean) << '\n';
  }
  std::cout << "wrote " << csv_path.string() << " and " << json_path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bulk synchronous farm cost model and simulator"};
  app.require_subcommand(1);

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Print analytical speedup and efficiency");
  analyze_cmd->add_option("--config", analyze.config, "Config file or bundled config name");
  analyze_cmd->add_option("--k", analyze.k_values, "Slave counts")->delimiter(',');
  analyze_cmd->add_option("--latency", analyze.latency, "One-byte latency L (s)");
  analyze_cmd->add_option("--t-s", analyze.t_s, "Send time per order (s)");
  analyze_cmd->add_option("--t-r", analyze.t_r, "Total receive time (s)");
  analyze_cmd->add_option("--t-p", analyze.t_p, "Total evaluation time (s)");
  analyze_cmd->add_option("--t-w", analyze.t_w, "Summed slave work (s)");
  analyze_cmd->add_option("--out", analyze.out, "Output CSV path (default stdout)");

  std::string sim_config, sim_out;
  Overrides sim_overrides;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run one engine and print the result JSON");
  simulate_cmd->add_option("--config", sim_config, "Config file or bundled config name")
      ->required();
  sim_overrides.add_to(*simulate_cmd);
  simulate_cmd->add_option("--out", sim_out, "Output JSON path (default stdout)");

  std::string exp_config, exp_out;
  bool quiet = false;
  Overrides exp_overrides;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a sweep, write CSV and JSON");
  experiment_cmd->add_option("--config", exp_config, "Config file or bundled config name")
      ->required();
  exp_overrides.add_to(*experiment_cmd);
  experiment_cmd->add_option("--out", exp_out, "Output directory (default .)");
  experiment_cmd->add_flag("--quiet", quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*analyze_cmd) return cmd_analyze(analyze);
    if (*simulate_cmd) return cmd_simulate(sim_config, sim_overrides, sim_out);
    return cmd_experiment(exp_config, exp_overrides, exp_out, quiet);
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEngine;
  }
}
