// Acceptance suite. Usage: bsf_acceptance [criterion numbers...]
// With no arguments every criterion runs. Prints one PASS/FAIL line per
// criterion and exits non-zero if any failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bsf/harness.hpp"
#include "bsf/live_engine.hpp"
#include "bsf/serialize.hpp"
#include "bsf/sim_core.hpp"

using namespace bsf;

namespace {

// Tolerances and thresholds, pinned.
constexpr double kExactnessTol = 1e-9;     // criterion 1
constexpr int kExactnessSamples = 1000;    // criterion 1
constexpr int kArgmaxSamples = 100;        // criterion 2
constexpr double kLiveTol = 0.10;          // criteria 4, 5
constexpr int kLiveTrials = 3;             // criteria 4, 5
constexpr int kLiveIterations = 10;        // criteria 4, 5
constexpr double kLiveScale = 0.01;        // criteria 4, 5
constexpr int kProtocolIterations = 10000; // criterion 6
constexpr double kScaleTol = 1e-12;        // criterion 7

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

BsfParams random_params(std::mt19937_64& rng) {
  BsfParams p;
  p.slaves = std::uniform_int_distribution<int>(1, 512)(rng);
  p.latency = log_uniform(rng, 1e-8, 1e-3);
  p.send_time = log_uniform(rng, 1e-7, 1.0);
  p.receive_time = log_uniform(rng, 1e-7, 100.0);
  p.evaluate_time = log_uniform(rng, 1e-7, 100.0);
  p.work = log_uniform(rng, 1e-3, 1e5);
  return p;
}

BsfParams table1_params(int k) {
  BsfParams p;
  p.slaves = k;
  p.latency = study::kLatency;
  p.send_time = study::kSendForQ;
  p.receive_time = study::kReceive;
  p.evaluate_time = study::kEvaluate;
  p.work = study::kWork;
  return p;
}

std::string fmt(double v) { return format_number(v); }

std::vector<int> live_k_values() {
  std::vector<int> ks = {1, 2, 4, 8};
  if (const auto cap = max_workers_from_env()) {
    ks.erase(std::remove_if(ks.begin(), ks.end(), [&](int k) { return k > *cap; }), ks.end());
  }
  return ks;
}

void print_rows(const std::vector<ComparisonRow>& rows) {
  std::cout << "    " << kCsvHeader << '\n';
  std::ostringstream csv;
  write_csv(csv, rows);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) std::cout << "    " << line << '\n';
}

ExperimentHooks live_hooks() {
  ExperimentHooks hooks;
  hooks.progress = [](const std::string& msg) { std::cerr << "    [live] " << msg << '\n'; };
  return hooks;
}

// 1. Serialized virtual runs reproduce the analytical speedup.
Verdict exactness() {
  Verdict v;
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int i = 0; i < kExactnessSamples; ++i) {
    const BsfParams p = random_params(rng);
    RunSpec spec;
    spec.params = p;
    spec.iterations = 3;
    const SimulationResult run = run_virtual(spec);
    spec.params = p.with_slaves(1);
    const SimulationResult base = run_virtual(spec);
    const double expected = speedup(p);
    const double err = std::abs(measured_speedup(base, run) - expected) / expected;
    worst = std::max(worst, err);
    if (!(err < kExactnessTol)) v.fail("k=" + std::to_string(p.slaves) + " rel_error=" + fmt(err));
  }
  if (v.pass) {
    v.detail = std::to_string(kExactnessSamples) + " parameter sets, max rel_error=" + fmt(worst);
  }
  return v;
}

// 2. The brute-force integer argmax of speedup is floor or ceil of the bound.
Verdict argmax() {
  Verdict v;
  std::mt19937_64 rng(20240602);
  int checked = 0;
  while (checked < kArgmaxSamples) {
    const BsfParams p = random_params(rng);
    const double star = scalability_bound(p);
    if (star > 5000.0) continue;  // keep the scan short
    const int limit = std::max(1, static_cast<int>(std::ceil(4.0 * star)));
    int best = 1;
    double best_value = -1.0;
    for (int k = 1; k <= limit; ++k) {
      const double s = speedup(p.with_slaves(k));
      if (s > best_value) {
        best_value = s;
        best = k;
      }
    }
    const int lo = std::max(1, static_cast<int>(std::floor(star)));
    const int hi = std::max(1, static_cast<int>(std::ceil(star)));
    if (best != lo && best != hi) {
      v.fail("K*=" + fmt(star) + " argmax=" + std::to_string(best));
    }
    ++checked;
  }
  if (v.pass) v.detail = std::to_string(checked) + " parameter sets";
  return v;
}

// 3. Approximate efficiency stays within the master-overhead ratio of the
// exact one for the reference parameters.
Verdict approximation_quality() {
  Verdict v;
  const BsfParams p = table1_params(1);
  const double limit =
      (2 * p.latency + p.send_time + p.receive_time + p.evaluate_time) / p.work;
  double worst = 0.0;
  for (int k = 1; k <= 350; ++k) {
    const BsfParams at = p.with_slaves(k);
    const double gap = std::abs(efficiency_exact(at) - efficiency_approx(at));
    worst = std::max(worst, gap);
    if (!(gap < limit)) v.fail("k=" + std::to_string(k) + " gap=" + fmt(gap));
  }
  if (v.pass) v.detail = "K in [1, 350], max gap=" + fmt(worst) + " < " + fmt(limit);
  return v;
}

// 4. Live speedup study at desk scale.
Verdict live_speedup() {
  Verdict v;
  ExperimentConfig config = ExperimentConfig::speedup_study(EngineChoice::Live);
  config.name = "acceptance_speedup";
  config.k_values = live_k_values();
  config.time_scale = kLiveScale;
  config.iterations = kLiveIterations;
  config.trials = kLiveTrials;
  const auto rows = run_experiment(config, live_hooks());
  print_rows(rows);

  for (const auto& row : rows) {
    if (!(row.rel_error < kLiveTol)) {
      v.fail("(a) v=" + fmt(row.control) + " k=" + std::to_string(row.k) +
             " rel_error=" + fmt(row.rel_error));
    }
  }
  std::map<double, double> mean;
  for (const auto& s : error_summary(rows)) mean[s.control] = s.mean;
  if (!(mean.at(6.0) <= mean.at(4.0))) {
    v.fail("(b) mean rel_error v=6 " + fmt(mean.at(6.0)) + " > v=4 " + fmt(mean.at(4.0)));
  }
  if (v.pass) {
    v.detail = "(a) all points < 10%; (b) mean rel_error v=4 " + fmt(mean.at(4.0)) +
               ", v=4.5 " + fmt(mean.at(4.5)) + ", v=6 " + fmt(mean.at(6.0));
  }
  return v;
}

// 5. Live efficiency study at desk scale.
Verdict live_efficiency() {
  Verdict v;
  ExperimentConfig config = ExperimentConfig::efficiency_study(EngineChoice::Live);
  config.name = "acceptance_efficiency";
  config.k_values = live_k_values();
  config.time_scale = kLiveScale;
  config.iterations = kLiveIterations;
  config.trials = kLiveTrials;
  const auto rows = run_experiment(config, live_hooks());
  print_rows(rows);

  std::map<double, std::map<int, ComparisonRow>> grid;
  for (const auto& row : rows) grid[row.control][row.k] = row;

  for (double q : {2.0, 20.0}) {
    for (const auto& [k, row] : grid.at(q)) {
      if (!(row.rel_error < kLiveTol)) {
        v.fail("(a) q=" + fmt(q) + " k=" + std::to_string(k) + " rel_error=" + fmt(row.rel_error));
      }
    }
  }
  for (int k : config.k_values) {
    const auto& low = grid.at(0.02).at(k);
    const auto& mid = grid.at(2.0).at(k);
    const auto& high = grid.at(20.0).at(k);
    if (!(low.analytical > mid.analytical && mid.analytical > high.analytical)) {
      v.fail("(b) analytical ordering broken at k=" + std::to_string(k));
    }
    // Measured efficiency at K = 1 is the baseline itself, identically 1
    // for every q; strict ordering is only observable from K = 2 on.
    if (k == 1) {
      if (low.simulated != 1.0 || mid.simulated != 1.0 || high.simulated != 1.0) {
        v.fail("(b) measured baseline efficiency differs from 1");
      }
    } else if (!(low.simulated > mid.simulated && mid.simulated > high.simulated)) {
      v.fail("(b) measured ordering broken at k=" + std::to_string(k) + ": " +
             fmt(low.simulated) + ", " + fmt(mid.simulated) + ", " + fmt(high.simulated));
    }
  }
  if (v.pass) v.detail = "(a) q in {2, 20} within 10%; (b) ordering holds at every K";
  return v;
}

// 6. Long live run with tiny suspensions keeps the protocol clean.
Verdict protocol_invariants() {
  Verdict v;
  LiveRunSpec spec;
  spec.slaves = 4;
  spec.iterations = kProtocolIterations;
  spec.order_length = 512;
  spec.result_length = 256;
  spec.work_suspension_us = 10;
  spec.evaluate_suspension_us = 5;
  spec.seed = 6;
  const SimulationResult r = run_live(spec);
  const ProtocolStats& s = *r.protocol;
  const std::uint64_t expected = 4ull * kProtocolIterations;
  if (s.ordering_violations != 0) v.fail("ordering violations: " + std::to_string(s.ordering_violations));
  if (s.checksum_failures != 0) v.fail("checksum failures: " + std::to_string(s.checksum_failures));
  if (s.orders_delivered != expected || s.results_delivered != expected) {
    v.fail("message counts " + std::to_string(s.orders_delivered) + "/" +
           std::to_string(s.results_delivered) + ", expected " + std::to_string(expected));
  }
  if (r.total_elapsed >= 60.0) v.fail("run took " + fmt(r.total_elapsed) + " s");
  if (v.pass) {
    v.detail = std::to_string(kProtocolIterations) + " iterations at K=4 in " +
               fmt(r.total_elapsed) + " s, 0 violations, 0 checksum failures";
  }
  return v;
}

// 7. Analytical values are invariant under time scaling.
Verdict scale_invariance() {
  Verdict v;
  std::vector<BsfParams> grid;
  for (const auto& config :
       {ExperimentConfig::speedup_study(EngineChoice::VirtualSerialized),
        ExperimentConfig::efficiency_study(EngineChoice::VirtualSerialized)}) {
    for (double c : config.control_values) {
      for (int k : config.k_values) grid.push_back(point_params(config, c, k));
    }
  }
  std::mt19937_64 rng(20240607);
  for (int i = 0; i < 500; ++i) grid.push_back(random_params(rng));

  double worst = 0.0;
  for (const BsfParams& p : grid) {
    const double s1 = speedup(p);
    const double e1 = efficiency_approx(p);
    const double x1 = efficiency_exact(p);
    for (double scale : {0.001, 0.01, 1.0}) {
      const BsfParams q = p.scaled(scale);
      for (auto [a, b] : {std::pair{speedup(q), s1}, std::pair{efficiency_approx(q), e1},
                          std::pair{efficiency_exact(q), x1}}) {
        const double err = std::abs(a - b) / b;
        worst = std::max(worst, err);
        if (!(err <= kScaleTol)) v.fail("scale=" + fmt(scale) + " rel diff=" + fmt(err));
      }
    }
  }
  if (v.pass) {
    v.detail = std::to_string(grid.size()) + " parameter sets, max rel diff=" + fmt(worst);
  }
  return v;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "serialized virtual speedup equals the analytical speedup", exactness},
      {2, "integer argmax of speedup is floor/ceil of the scalability bound", argmax},
      {3, "approximate efficiency gap below master-overhead ratio", approximation_quality},
      {4, "live speedup study at desk scale", live_speedup},
      {5, "live efficiency study at desk scale", live_efficiency},
      {6, "live protocol invariants over 10000 iterations", protocol_invariants},
      {7, "analytical values invariant under time scaling", scale_invariance},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.id)) continue;
    Verdict verdict;
    try {
      verdict = c.check();
    } catch (const std::exception& e) {
      verdict.fail(std::string("exception: ") + e.what());
    }
    std::cout << (verdict.pass ? "[PASS] " : "[FAIL] ") << "AC" << c.id << " " << c.title
              << " -- " << verdict.detail << std::endl;
    if (!verdict.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
