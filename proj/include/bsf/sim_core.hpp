#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "bsf/cost_model.hpp"

namespace bsf {

enum class Engine { Virtual, Live };
enum class LatencyMode { Serialized, Pipelined };

std::string_view to_string(Engine engine);
std::string_view to_string(LatencyMode mode);
Engine parse_engine(std::string_view text);
LatencyMode parse_latency_mode(std::string_view text);

/// Where the time of one macro-step cycle went.
struct IterationTimeline {
  Seconds send_total = 0.0;
  Seconds latency_total = 0.0;
  Seconds work_span = 0.0;
  Seconds receive_total = 0.0;
  Seconds evaluate_total = 0.0;
  Seconds iteration_elapsed = 0.0;

  bool operator==(const IterationTimeline&) const = default;
};

/// Protocol audit counters; only the live engine fills these in.
struct ProtocolStats {
  std::uint64_t ordering_violations = 0;
  std::uint64_t checksum_failures = 0;
  std::uint64_t orders_delivered = 0;
  std::uint64_t results_delivered = 0;

  bool operator==(const ProtocolStats&) const = default;
};

struct SimulationResult {
  Engine engine = Engine::Virtual;
  LatencyMode latency_mode = LatencyMode::Serialized;
  BsfParams params;
  int iterations = 0;
  std::vector<IterationTimeline> per_iteration;
  Seconds mean_iteration = 0.0;
  Seconds total_elapsed = 0.0;
  std::optional<ProtocolStats> protocol;

  bool operator==(const SimulationResult&) const = default;
};

/// Returns false to stop the iterative process early. Called after each
/// iteration with its 1-based index.
using ContinuePredicate = std::function<bool(int iteration, const IterationTimeline&)>;

struct RunSpec {
  BsfParams params;
  int iterations = 10;
  Seconds init_cost = 0.0;
  Seconds final_cost = 0.0;
  LatencyMode latency_mode = LatencyMode::Serialized;
  std::uint64_t seed = 1;
  ContinuePredicate keep_going;  // empty: run exactly `iterations`

  void validate() const;
};

/// One entry of the virtual engine's event log.
struct SimEvent {
  enum class Kind {
    OrderSent,
    OrderArrived,
    WorkDone,
    BarrierReleased,
    ResultArrived,
    ReceiveDone,
    EvaluateStart,
    EvaluateDone,
  };
  Seconds time = 0.0;
  Kind kind = Kind::OrderSent;
  int iteration = 0;  // 1-based
  int slave = 0;      // 1..K, 0 for master-only events
};

std::string_view to_string(SimEvent::Kind kind);

/// Deterministic virtual-clock execution of the iterative process.
SimulationResult run_virtual(const RunSpec& spec);

/// As run_virtual(), additionally returning every processed event in
/// processing order.
SimulationResult run_virtual(const RunSpec& spec, std::vector<SimEvent>& trace);

/// T(1) / T(K) from two runs that differ only in the slave count.
double measured_speedup(const SimulationResult& base, const SimulationResult& run);

double measured_efficiency(const SimulationResult& base, const SimulationResult& run);

/// Fills mean_iteration from per_iteration.
void finalize_means(SimulationResult& result);

}  // namespace bsf
