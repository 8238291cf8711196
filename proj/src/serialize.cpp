#include "bsf/serialize.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace bsf {

using nlohmann::json;

std::string format_number(double value) {
  char buf[32];
  for (int precision = 9; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

json to_json(const BsfParams& p) {
  return {{"k", p.slaves},         {"latency", p.latency},   {"t_s", p.send_time},
          {"t_r", p.receive_time}, {"t_p", p.evaluate_time}, {"t_w", p.work}};
}

json to_json(const IterationTimeline& t) {
  return {{"send_total", t.send_total},       {"latency_total", t.latency_total},
          {"work_span", t.work_span},         {"receive_total", t.receive_total},
          {"evaluate_total", t.evaluate_total}, {"iteration_elapsed", t.iteration_elapsed}};
}

json to_json(const SimulationResult& r) {
  json per_iteration = json::array();
  for (const auto& t : r.per_iteration) per_iteration.push_back(to_json(t));
  json doc = {{"engine", to_string(r.engine)},
              {"latency_mode", to_string(r.latency_mode)},
              {"params", to_json(r.params)},
              {"iterations", r.iterations},
              {"mean_iteration", r.mean_iteration},
              {"total_elapsed", r.total_elapsed},
              {"per_iteration", std::move(per_iteration)}};
  if (r.protocol) {
    doc["protocol"] = {{"ordering_violations", r.protocol->ordering_violations},
                       {"checksum_failures", r.protocol->checksum_failures},
                       {"orders_delivered", r.protocol->orders_delivered},
                       {"results_delivered", r.protocol->results_delivered}};
  }
  return doc;
}

json to_json(const ExperimentConfig& c) {
  json base = to_json(c.base);
  base.erase("k");
  return {{"name", c.name},
          {"sweep", to_string(c.kind)},
          {"k_values", c.k_values},
          {"control_values", c.control_values},
          {"fixed_params", std::move(base)},
          {"iterations", c.iterations},
          {"engine", to_string(c.engine)},
          {"time_scale", c.time_scale},
          {"trials", c.trials},
          {"seed", c.seed}};
}

json to_json(const ComparisonRow& row) {
  return {{"sweep", to_string(row.sweep)},
          {"control", row.control},
          {"K", row.k},
          {"analytical", row.analytical},
          {"simulated", row.simulated},
          {"rel_error", row.rel_error},
          {"engine", to_string(row.engine)},
          {"iterations", row.iterations},
          {"time_scale", row.time_scale},
          {"params", to_json(row.params)}};
}

namespace {

std::vector<ComparisonRow> sorted(std::span<const ComparisonRow> rows) {
  std::vector<ComparisonRow> out(rows.begin(), rows.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.control != b.control ? a.control < b.control : a.k < b.k;
  });
  return out;
}

std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << kCsvHeader << '\n';
  for (const auto& row : sorted(rows)) {
    out << to_string(row.sweep) << ',' << format_number(row.control) << ',' << row.k << ','
        << format_number(row.analytical) << ',' << format_number(row.simulated) << ','
        << format_number(row.rel_error) << ',' << to_string(row.engine) << ',' << row.iterations
        << ',' << format_number(row.time_scale) << '\n';
  }
}

json experiment_bundle(const ExperimentConfig& config, std::span<const ComparisonRow> rows) {
  json row_docs = json::array();
  for (const auto& row : sorted(rows)) row_docs.push_back(to_json(row));

  json summary = json::array();
  if (!rows.empty()) {
    for (const auto& s : error_summary(rows)) {
      summary.push_back(
          {{"control", s.control}, {"max", s.max}, {"mean", s.mean}, {"count", s.count}});
    }
  }

  json metadata = {{"host", host_name()}, {"seed", config.seed}};
  if (config.kind == SweepKind::VSweep) {
    // Formula send times are used; the measured adjustments are kept for reference.
    json measured = json::array();
    for (const auto& m : study::kMeasuredSend) {
      measured.push_back({{"v", m.v},
                          {"measured_t_s", m.send_time},
                          {"formula_t_s", std::pow(10.0, -m.v) * config.base.work},
                          {"order_length", m.order_length}});
    }
    metadata["measured_send_times"] = std::move(measured);
  }

  return {{"config", to_json(config)},
          {"metadata", std::move(metadata)},
          {"rows", std::move(row_docs)},
          {"summary", std::move(summary)}};
}

}  // namespace bsf
