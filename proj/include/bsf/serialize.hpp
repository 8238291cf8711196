#pragma once

#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "bsf/harness.hpp"

namespace bsf {

/// Shortest decimal that round-trips the double (up to 17 significant digits).
std::string format_number(double value);

nlohmann::json to_json(const BsfParams& params);
nlohmann::json to_json(const IterationTimeline& timeline);
nlohmann::json to_json(const SimulationResult& result);
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const ComparisonRow& row);

inline constexpr const char* kCsvHeader =
    "sweep,control,K,analytical,simulated,rel_error,engine,iterations,time_scale";

/// Header plus one line per row, rows sorted by (control, K).
void write_csv(std::ostream& out, std::span<const ComparisonRow> rows);

/// CSV rows, config echo, error summary and run metadata in one document.
nlohmann::json experiment_bundle(const ExperimentConfig& config,
                                 std::span<const ComparisonRow> rows);

}  // namespace bsf
