#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bsf/sim_core.hpp"

namespace bsf {

/// A live run failed at runtime: spawn failure, a dead slave, or the
/// worker cap was exceeded.
class EngineError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Bytes = std::vector<std::uint8_t>;

std::uint64_t payload_checksum(std::span<const std::uint8_t> bytes);

/// Pseudo-random bytes; identical (seed, stream, length) give identical bytes.
Bytes make_payload(std::size_t length, std::uint64_t seed, std::uint64_t stream);

struct Order {
  Bytes payload;
  std::uint64_t checksum = 0;
  int iteration_index = 0;
};

struct ResultMsg {
  Bytes payload;
  std::uint64_t checksum = 0;
  int slave_id = 0;
  int iteration_index = 0;
};

/// Test hook: slave `slave` stops responding when it receives the order of
/// iteration `iteration`.
struct SlaveFault {
  int slave = 1;
  int iteration = 1;
};

struct LiveRunSpec {
  int slaves = 1;
  int iterations = 10;
  std::size_t order_length = 1;
  std::size_t result_length = 1;
  std::int64_t work_suspension_us = 0;
  std::int64_t evaluate_suspension_us = 0;
  /// Optional master-side suspension per order, replacing payload-driven
  /// send cost on hosts where large payloads are impractical.
  std::int64_t send_suspension_us = 0;
  std::uint64_t seed = 1;
  /// Parameters this run realizes; echoed into SimulationResult::params.
  /// When absent they are reconstructed from the suspensions.
  std::optional<BsfParams> nominal;
  std::optional<SlaveFault> fault;

  void validate() const;
};

/// Worker cap from BSF_MAX_WORKERS, or nullopt when unset.
std::optional<int> max_workers_from_env();

/// Runs the master/slave protocol with one master and K slave threads.
/// Throws ValidationError for a bad spec, EngineError for runtime failures.
SimulationResult run_live(const LiveRunSpec& spec);

/// Median one-way transfer time (round trip / 2) of a `message_length`
/// byte message over the engine's channel.
Seconds calibrate_send_cost(std::size_t message_length, int trials);

/// Linear transfer model: cost(n) = fixed + n / bytes_per_second.
struct TransferModel {
  Seconds fixed = 0.0;
  double bytes_per_second = 1e9;

  /// Payload length whose transfer costs about `cost` beyond the fixed part.
  std::size_t bytes_for(Seconds cost) const;
};

/// Fits a TransferModel from calibration at 1 byte and `probe_length` bytes.
TransferModel calibrate_transfer_model(int trials, std::size_t probe_length = 4u << 20);

/// Maps a cost description onto live-engine settings: suspensions for the
/// work and evaluation, payload lengths for the send and receive costs.
/// Positive suspensions are floored at `min_suspension_us`.
LiveRunSpec live_spec_from_params(const BsfParams& params, int iterations, std::uint64_t seed,
                                  const TransferModel& transfer,
                                  std::int64_t min_suspension_us = 50);

}  // namespace bsf
