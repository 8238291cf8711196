#include "bsf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace bsf {

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::VSweep: return "v_sweep";
    case SweepKind::QSweep: return "q_sweep";
    case SweepKind::Custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(EngineChoice engine) {
  switch (engine) {
    case EngineChoice::VirtualSerialized: return "virtual_serialized";
    case EngineChoice::VirtualPipelined: return "virtual_pipelined";
    case EngineChoice::Live: return "live";
  }
  return "unknown";
}

SweepKind parse_sweep_kind(std::string_view text) {
  if (text == "v_sweep") return SweepKind::VSweep;
  if (text == "q_sweep") return SweepKind::QSweep;
  if (text == "custom") return SweepKind::Custom;
  throw ValidationError("sweep kind must be one of {v_sweep, q_sweep, custom}, got '" +
                        std::string(text) + "'");
}

EngineChoice parse_engine_choice(std::string_view text) {
  if (text == "virtual_serialized") return EngineChoice::VirtualSerialized;
  if (text == "virtual_pipelined") return EngineChoice::VirtualPipelined;
  if (text == "live") return EngineChoice::Live;
  throw ValidationError(
      "engine must be one of {virtual_serialized, virtual_pipelined, live}, got '" +
      std::string(text) + "'");
}

void ExperimentConfig::validate() const {
  if (k_values.empty()) throw ValidationError("k_values must not be empty");
  if (k_values.front() < 1) throw ValidationError("k_values must be >= 1");
  if (std::adjacent_find(k_values.begin(), k_values.end(), std::greater_equal<>()) !=
      k_values.end()) {
    throw ValidationError("k_values must be strictly increasing");
  }
  if (control_values.empty()) throw ValidationError("control_values must not be empty");
  for (double c : control_values) {
    if (!std::isfinite(c)) throw ValidationError("control_values must be finite");
  }
  if (!(time_scale > 0.0) || !std::isfinite(time_scale)) {
    throw ValidationError("time_scale must be > 0");
  }
  if (iterations < 1) throw ValidationError("iterations must be >= 1");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (engine == EngineChoice::Live) {
    if (const auto cap = max_workers_from_env(); cap && k_values.back() > *cap) {
      throw EngineError("k = " + std::to_string(k_values.back()) +
                        " exceeds BSF_MAX_WORKERS = " + std::to_string(*cap));
    }
  }
  // Every grid point must produce a valid parameter set.
  for (double c : control_values) point_params(*this, c, k_values.front()).validate();
}

ExperimentConfig ExperimentConfig::speedup_study(EngineChoice engine) {
  ExperimentConfig c;
  c.name = "speedup_study";
  c.kind = SweepKind::VSweep;
  c.base.latency = study::kLatency;
  c.base.receive_time = study::kReceive;
  c.base.evaluate_time = study::kEvaluate;
  c.base.work = study::kWork;
  c.control_values = {4.0, 4.5, 6.0};
  c.engine = engine;
  if (engine == EngineChoice::Live) {
    c.k_values = {1, 2, 4, 8, 16};
    c.time_scale = 0.01;
  } else {
    for (int k = 1; k <= 350; k += 10) c.k_values.push_back(k);
  }
  return c;
}

ExperimentConfig ExperimentConfig::efficiency_study(EngineChoice engine) {
  ExperimentConfig c = speedup_study(engine);
  c.name = "efficiency_study";
  c.kind = SweepKind::QSweep;
  c.base.send_time = study::kSendForQ;
  c.control_values = {0.02, 2.0, 20.0};
  return c;
}

double analytical_value(SweepKind kind, const BsfParams& params) {
  return kind == SweepKind::QSweep ? efficiency_approx(params) : speedup(params);
}

BsfParams point_params(const ExperimentConfig& config, double control, int k) {
  const BsfParams base = config.base.with_slaves(k);
  switch (config.kind) {
    case SweepKind::VSweep: return params_from_v(control, base);
    case SweepKind::QSweep: return params_from_q(control, base);
    case SweepKind::Custom: {
      BsfParams p = base;
      p.send_time = control;
      p.validate();
      return p;
    }
  }
  throw std::logic_error("unhandled sweep kind");
}

namespace {

std::string coordinate(const ExperimentConfig& config, double control, int k) {
  std::ostringstream out;
  out << to_string(config.kind) << " control=" << control << " k=" << k;
  return out.str();
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Runs the configured engine for one parameter set.
class EngineRunner {
public:
  EngineRunner(const ExperimentConfig& config, ExperimentHooks& hooks)
      : config_(config), hooks_(hooks) {}

  SimulationResult run(const BsfParams& params, int trial) {
    if (config_.engine == EngineChoice::Live) {
      if (!hooks_.transfer) {
        report("calibrating channel transfer cost");
        hooks_.transfer = calibrate_transfer_model(21);
      }
      const std::uint64_t seed = config_.seed + static_cast<std::uint64_t>(trial);
      return run_live(live_spec_from_params(params, config_.iterations, seed, *hooks_.transfer));
    }
    RunSpec spec;
    spec.params = params;
    spec.iterations = config_.iterations;
    spec.seed = config_.seed;
    spec.latency_mode = config_.engine == EngineChoice::VirtualPipelined
                            ? LatencyMode::Pipelined
                            : LatencyMode::Serialized;
    return run_virtual(spec);
  }

  void report(const std::string& message) const {
    if (hooks_.progress) hooks_.progress(message);
  }

private:
  const ExperimentConfig& config_;
  ExperimentHooks& hooks_;
};

}  // namespace

std::vector<ComparisonRow> run_experiment(const ExperimentConfig& config, ExperimentHooks hooks) {
  config.validate();

  std::vector<double> controls = config.control_values;
  std::sort(controls.begin(), controls.end());
  controls.erase(std::unique(controls.begin(), controls.end()), controls.end());

  EngineRunner runner(config, hooks);
  // The virtual engine is deterministic, so one trial suffices.
  const int trials = config.engine == EngineChoice::Live ? config.trials : 1;

  std::vector<ComparisonRow> rows;
  for (double control : controls) {
    // Baselines at K = 1, one per trial, shared by every K of this control.
    std::map<int, SimulationResult> baselines;
    for (int k : config.k_values) {
      const BsfParams unscaled = point_params(config, control, k);
      const BsfParams params = unscaled.scaled(config.time_scale);

      ComparisonRow row;
      row.sweep = config.kind;
      row.control = control;
      row.k = k;
      row.engine = config.engine;
      row.iterations = config.iterations;
      row.time_scale = config.time_scale;
      row.params = params;
      row.analytical = analytical_value(config.kind, params);

      if (config.time_scale != 1.0) {
        const double reference = analytical_value(config.kind, unscaled);
        if (std::abs(row.analytical - reference) > 1e-12 * reference) {
          throw std::logic_error("analytical value is not invariant under time scaling at " +
                                 coordinate(config, control, k));
        }
      }

      std::vector<double> measured;
      try {
        for (int trial = 0; trial < trials; ++trial) {
          auto base_it = baselines.find(trial);
          if (base_it == baselines.end()) {
            runner.report("baseline " + coordinate(config, control, 1) + " trial " +
                          std::to_string(trial + 1));
            base_it = baselines.emplace(trial, runner.run(params.with_slaves(1), trial)).first;
          }
          const SimulationResult& base = base_it->second;
          double speedup_value = 1.0;
          if (k != 1) {
            runner.report("run " + coordinate(config, control, k) + " trial " +
                          std::to_string(trial + 1));
            speedup_value = measured_speedup(base, runner.run(params, trial));
          }
          measured.push_back(config.kind == SweepKind::QSweep ? speedup_value / k
                                                              : speedup_value);
        }
      } catch (const EngineError& e) {
        throw EngineError(coordinate(config, control, k) + ": " + e.what());
      }

      row.simulated = median(std::move(measured));
      row.rel_error = std::abs(row.simulated - row.analytical) / row.analytical;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ErrorSummary> error_summary(std::span<const ComparisonRow> rows) {
  if (rows.empty()) throw ValidationError("error_summary needs at least one row");
  std::map<double, ErrorSummary> groups;
  for (const auto& row : rows) {
    auto& g = groups[row.control];
    g.control = row.control;
    g.max = std::max(g.max, row.rel_error);
    g.mean += row.rel_error;
    ++g.count;
  }
  std::vector<ErrorSummary> out;
  for (auto& [control, g] : groups) {
    g.mean /= static_cast<double>(g.count);
    out.push_back(g);
  }
  return out;
}

}  // namespace bsf
