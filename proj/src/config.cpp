#include "bsf/config.hpp"

#include <fstream>
#include <set>

namespace bsf {

using nlohmann::json;

namespace {

void reject_unknown(const json& section, const std::string& where,
                    const std::set<std::string>& known) {
  if (!section.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : section.items()) {
    if (!known.contains(key)) {
      throw ValidationError(where + "." + key + ": unknown key");
    }
  }
}

template <typename T>
void read(const json& section, const std::string& where, const char* key, std::optional<T>& out) {
  if (!section.contains(key)) return;
  const json& value = section.at(key);
  const std::string path = where + "." + key;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!value.is_string()) throw ValidationError(path + ": expected a string");
  } else if constexpr (std::is_same_v<T, double>) {
    if (!value.is_number()) throw ValidationError(path + ": expected a number");
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!value.is_number_unsigned()) throw ValidationError(path + ": expected an integer >= 0");
  } else if constexpr (std::is_integral_v<T>) {
    if (!value.is_number_integer()) throw ValidationError(path + ": expected an integer");
  } else {
    // Lists of numbers.
    if (!value.is_array() || value.empty()) throw ValidationError(path + ": expected a non-empty list");
    using Elem = typename T::value_type;
    for (const auto& item : value) {
      const bool ok = std::is_integral_v<Elem> ? item.is_number_integer() : item.is_number();
      if (!ok) {
        throw ValidationError(path + ": expected a list of " +
                              (std::is_integral_v<Elem> ? "integers" : "numbers"));
      }
    }
  }
  out = value.get<T>();
}

// Rethrows parameter validation failures under the section name.
template <typename Fn>
auto in_section(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    throw ValidationError(where + "." + e.what());
  }
}

}  // namespace

CliConfigFile CliConfigFile::parse(const json& doc) {
  CliConfigFile file;
  reject_unknown(doc, "config", {"name", "params", "run", "sweep"});
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ValidationError("config.name: expected a string");
    file.name = doc["name"].get<std::string>();
  }
  if (doc.contains("params")) {
    const json& s = doc["params"];
    reject_unknown(s, "params", {"k", "latency", "t_s", "t_r", "t_p", "t_w"});
    read(s, "params", "k", file.params.k);
    read(s, "params", "latency", file.params.latency);
    read(s, "params", "t_s", file.params.t_s);
    read(s, "params", "t_r", file.params.t_r);
    read(s, "params", "t_p", file.params.t_p);
    read(s, "params", "t_w", file.params.t_w);
  }
  if (doc.contains("run")) {
    const json& s = doc["run"];
    reject_unknown(s, "run", {"engine", "latency_mode", "iterations", "seed", "time_scale",
                              "trials", "init_cost", "final_cost"});
    read(s, "run", "engine", file.run.engine);
    read(s, "run", "latency_mode", file.run.latency_mode);
    read(s, "run", "iterations", file.run.iterations);
    read(s, "run", "seed", file.run.seed);
    read(s, "run", "time_scale", file.run.time_scale);
    read(s, "run", "trials", file.run.trials);
    read(s, "run", "init_cost", file.run.init_cost);
    read(s, "run", "final_cost", file.run.final_cost);
  }
  if (doc.contains("sweep")) {
    const json& s = doc["sweep"];
    reject_unknown(s, "sweep", {"kind", "control_values", "k_values"});
    read(s, "sweep", "kind", file.sweep.kind);
    read(s, "sweep", "control_values", file.sweep.control_values);
    read(s, "sweep", "k_values", file.sweep.k_values);
  }
  return file;
}

CliConfigFile CliConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  CliConfigFile file = parse(doc);
  if (!doc.contains("name")) file.name = path.stem().string();
  return file;
}

BsfParams to_params(const CliConfigFile& file) {
  const auto& p = file.params;
  if (!p.t_w) throw ValidationError("params.t_w: required");
  BsfParams params;
  params.slaves = p.k.value_or(1);
  params.latency = p.latency.value_or(0.0);
  params.send_time = p.t_s.value_or(0.0);
  params.receive_time = p.t_r.value_or(0.0);
  params.evaluate_time = p.t_p.value_or(0.0);
  params.work = *p.t_w;
  in_section("params", [&] { params.validate(); });
  return params;
}

Engine engine_of(const CliConfigFile& file) {
  return in_section("run", [&] { return parse_engine(file.run.engine.value_or("virtual")); });
}

RunSpec to_run_spec(const CliConfigFile& file) {
  const double scale = file.run.time_scale.value_or(1.0);
  if (!(scale > 0.0)) throw ValidationError("run.time_scale: must be > 0");
  RunSpec spec;
  spec.params = to_params(file).scaled(scale);
  spec.iterations = file.run.iterations.value_or(10);
  spec.seed = file.run.seed.value_or(1);
  spec.init_cost = file.run.init_cost.value_or(0.0);
  spec.final_cost = file.run.final_cost.value_or(0.0);
  spec.latency_mode = in_section(
      "run", [&] { return parse_latency_mode(file.run.latency_mode.value_or("serialized")); });
  in_section("run", [&] { spec.validate(); });
  return spec;
}

ExperimentConfig to_experiment(const CliConfigFile& file) {
  const SweepKind kind =
      in_section("sweep", [&] { return parse_sweep_kind(file.sweep.kind.value_or("v_sweep")); });

  EngineChoice engine = EngineChoice::VirtualSerialized;
  if (engine_of(file) == Engine::Live) {
    engine = EngineChoice::Live;
  } else if (in_section("run", [&] {
               return parse_latency_mode(file.run.latency_mode.value_or("serialized"));
             }) == LatencyMode::Pipelined) {
    engine = EngineChoice::VirtualPipelined;
  }

  ExperimentConfig config = kind == SweepKind::QSweep
                                ? ExperimentConfig::efficiency_study(engine)
                                : ExperimentConfig::speedup_study(engine);
  config.name = file.name;
  config.kind = kind;
  if (kind == SweepKind::Custom && !file.sweep.control_values) {
    throw ValidationError("sweep.control_values: required for a custom sweep");
  }

  const auto& p = file.params;
  if (p.k) throw ValidationError("params.k: not allowed in a sweep, use sweep.k_values");
  if (p.latency) config.base.latency = *p.latency;
  if (p.t_s) config.base.send_time = *p.t_s;
  if (p.t_r) config.base.receive_time = *p.t_r;
  if (p.t_p) config.base.evaluate_time = *p.t_p;
  if (p.t_w) config.base.work = *p.t_w;

  if (file.sweep.control_values) config.control_values = *file.sweep.control_values;
  if (file.sweep.k_values) config.k_values = *file.sweep.k_values;
  if (file.run.iterations) config.iterations = *file.run.iterations;
  if (file.run.seed) config.seed = *file.run.seed;
  if (file.run.time_scale) config.time_scale = *file.run.time_scale;
  if (file.run.trials) config.trials = *file.run.trials;

  in_section("sweep", [&] { config.validate(); });
  return config;
}

}  // namespace bsf
