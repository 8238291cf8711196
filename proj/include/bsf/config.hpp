#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsf/harness.hpp"

namespace bsf {

/// Parsed config document. Every field is optional; absent values fall back
/// to defaults when converted. Unknown keys are rejected at parse time.
struct CliConfigFile {
  struct Params {
    std::optional<int> k;
    std::optional<double> latency;
    std::optional<double> t_s;
    std::optional<double> t_r;
    std::optional<double> t_p;
    std::optional<double> t_w;
  };
  struct Run {
    std::optional<std::string> engine;  // virtual | live
    std::optional<std::string> latency_mode;
    std::optional<int> iterations;
    std::optional<std::uint64_t> seed;
    std::optional<double> time_scale;
    std::optional<int> trials;
    std::optional<double> init_cost;
    std::optional<double> final_cost;
  };
  struct Sweep {
    std::optional<std::string> kind;
    std::optional<std::vector<double>> control_values;
    std::optional<std::vector<int>> k_values;
  };

  std::string name = "config";
  Params params;
  Run run;
  Sweep sweep;

  static CliConfigFile parse(const nlohmann::json& doc);
  static CliConfigFile load(const std::filesystem::path& path);
};

/// Cost parameters from the params section. t_w is required; k defaults to
/// 1 and every other time to 0.
BsfParams to_params(const CliConfigFile& file);

/// Virtual engine run spec; time_scale is applied to the parameters.
RunSpec to_run_spec(const CliConfigFile& file);

Engine engine_of(const CliConfigFile& file);

/// Sweep configuration. Missing fixed parameters and control values come
/// from the study defaults of the sweep kind.
ExperimentConfig to_experiment(const CliConfigFile& file);

}  // namespace bsf
