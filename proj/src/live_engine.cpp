#include "bsf/live_engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <string>
#include <system_error>
#include <thread>

#include "bsf/barrier.hpp"
#include "bsf/channel.hpp"

namespace bsf {

namespace {

using Clock = std::chrono::steady_clock;

Seconds since(Clock::time_point start, Clock::time_point end) {
  return std::chrono::duration<double>(end - start).count();
}

void suspend_us(std::int64_t us) {
  if (us > 0) std::this_thread::sleep_for(std::chrono::microseconds(us));
}

constexpr std::size_t kMaxPayload = std::size_t{1} << 30;

}  // namespace

std::uint64_t payload_checksum(std::span<const std::uint8_t> bytes) {
  // FNV-style mixing over 8-byte words, then the tail.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ bytes.size();
  constexpr std::uint64_t prime = 0x100000001b3ULL;
  std::size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    std::uint64_t word;
    std::memcpy(&word, bytes.data() + i, sizeof word);
    h = (h ^ word) * prime;
  }
  for (; i < bytes.size(); ++i) h = (h ^ bytes[i]) * prime;
  return h ^ (h >> 29);
}

Bytes make_payload(std::size_t length, std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  Bytes bytes(length);
  std::size_t i = 0;
  for (; i + 8 <= length; i += 8) {
    const std::uint64_t word = rng();
    std::memcpy(bytes.data() + i, &word, sizeof word);
  }
  if (i < length) {
    const std::uint64_t word = rng();
    std::memcpy(bytes.data() + i, &word, length - i);
  }
  return bytes;
}

void LiveRunSpec::validate() const {
  if (slaves < 1) throw ValidationError("k must be >= 1, got " + std::to_string(slaves));
  if (iterations < 1) {
    throw ValidationError("iterations must be >= 1, got " + std::to_string(iterations));
  }
  if (order_length < 1 || result_length < 1) {
    throw ValidationError("order and result lengths must be >= 1 byte");
  }
  if (order_length > kMaxPayload || result_length > kMaxPayload) {
    throw ValidationError("payload lengths above 1 GiB are not supported; use send suspension");
  }
  if (work_suspension_us < 0 || evaluate_suspension_us < 0 || send_suspension_us < 0) {
    throw ValidationError("suspensions must be >= 0 microseconds");
  }
  if (nominal && nominal->slaves != slaves) {
    throw ValidationError("nominal parameters disagree with k");
  }
}

std::optional<int> max_workers_from_env() {
  const char* raw = std::getenv("BSF_MAX_WORKERS");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || value < 1) {
    throw ValidationError(std::string("BSF_MAX_WORKERS must be a positive integer, got '") +
                          raw + "'");
  }
  return static_cast<int>(value);
}

namespace {

struct SharedState {
  explicit SharedState(int slaves)
      : barrier(slaves + 1), to_slave(static_cast<std::size_t>(slaves)),
        to_master(static_cast<std::size_t>(slaves)) {}

  Barrier barrier;
  std::vector<Channel<Order>> to_slave;
  std::vector<Channel<ResultMsg>> to_master;

  std::atomic<int> dead_slave{0};
  std::atomic<int> dead_iteration{0};
  std::atomic<std::uint64_t> ordering_violations{0};
  std::atomic<std::uint64_t> checksum_failures{0};
  std::atomic<std::uint64_t> orders_delivered{0};

  void mark_dead(int slave, int iteration) {
    int expected = 0;
    if (dead_slave.compare_exchange_strong(expected, slave)) dead_iteration = iteration;
  }

  void shut_down() {
    barrier.break_barrier();
    for (auto& ch : to_slave) ch.close();
    for (auto& ch : to_master) ch.close();
  }
};

struct SlavePayloads {
  Bytes result;
  std::uint64_t result_checksum = 0;
};

void slave_main(const LiveRunSpec& spec, int id, SharedState& shared, const SlavePayloads& mine) {
  auto& inbox = shared.to_slave[static_cast<std::size_t>(id - 1)];
  auto& outbox = shared.to_master[static_cast<std::size_t>(id - 1)];
  int iteration = 0;
  try {
    for (iteration = 1; iteration <= spec.iterations; ++iteration) {
      std::optional<Order> order = inbox.receive();
      if (!order) return;  // master shut the run down
      if (spec.fault && spec.fault->slave == id && spec.fault->iteration == iteration) {
        shared.mark_dead(id, iteration);
        outbox.close();
        shared.barrier.break_barrier();
        return;
      }
      shared.orders_delivered.fetch_add(1, std::memory_order_relaxed);
      if (order->iteration_index != iteration) shared.ordering_violations.fetch_add(1);
      if (payload_checksum(order->payload) != order->checksum) shared.checksum_failures.fetch_add(1);

      suspend_us(spec.work_suspension_us);
      if (!shared.barrier.arrive_and_wait()) return;

      ResultMsg result{mine.result, mine.result_checksum, id, iteration};
      if (!outbox.send(std::move(result))) return;
    }
  } catch (...) {
    shared.mark_dead(id, iteration);
    outbox.close();
    shared.barrier.break_barrier();
  }
}

[[noreturn]] void fail_with_dead_slave(const SharedState& shared, int suspect, int iteration) {
  int slave = shared.dead_slave.load();
  int at = shared.dead_iteration.load();
  if (slave == 0) {
    slave = suspect;
    at = iteration;
  }
  throw EngineError("slave " + std::to_string(slave) + " disconnected at iteration " +
                    std::to_string(at));
}

}  // namespace

SimulationResult run_live(const LiveRunSpec& spec) {
  spec.validate();
  if (const auto cap = max_workers_from_env(); cap && spec.slaves > *cap) {
    throw EngineError("k = " + std::to_string(spec.slaves) + " exceeds BSF_MAX_WORKERS = " +
                      std::to_string(*cap));
  }

  const int k = spec.slaves;
  std::vector<Bytes> orders;
  std::vector<std::uint64_t> order_checksums;
  std::vector<SlavePayloads> slave_payloads(static_cast<std::size_t>(k));
  for (int id = 1; id <= k; ++id) {
    orders.push_back(make_payload(spec.order_length, spec.seed, 2 * id));
    order_checksums.push_back(payload_checksum(orders.back()));
    auto& sp = slave_payloads[static_cast<std::size_t>(id - 1)];
    sp.result = make_payload(spec.result_length, spec.seed, 2 * id + 1);
    sp.result_checksum = payload_checksum(sp.result);
  }

  SharedState shared(k);
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(k));

  // Joins on every exit path; shuts the protocol down first unless the run
  // completed normally.
  struct Joiner {
    SharedState& shared;
    std::vector<std::thread>& workers;
    bool completed = false;
    ~Joiner() {
      if (!completed) shared.shut_down();
      for (auto& w : workers) {
        if (w.joinable()) w.join();
      }
    }
  } joiner{shared, workers};

  const auto run_start = Clock::now();
  for (int id = 1; id <= k; ++id) {
    try {
      workers.emplace_back(slave_main, std::cref(spec), id, std::ref(shared),
                           std::cref(slave_payloads[static_cast<std::size_t>(id - 1)]));
    } catch (const std::system_error& e) {
      throw EngineError("failed to spawn slave " + std::to_string(id) + ": " + e.what());
    }
  }

  SimulationResult result;
  result.engine = Engine::Live;
  result.latency_mode = LatencyMode::Pipelined;
  result.per_iteration.reserve(static_cast<std::size_t>(spec.iterations));
  ProtocolStats stats;

  for (int iteration = 1; iteration <= spec.iterations; ++iteration) {
    const auto t0 = Clock::now();
    for (int id = 1; id <= k; ++id) {
      const auto slot = static_cast<std::size_t>(id - 1);
      suspend_us(spec.send_suspension_us);
      Order order{orders[slot], order_checksums[slot], iteration};
      if (!shared.to_slave[slot].send(std::move(order))) {
        fail_with_dead_slave(shared, id, iteration);
      }
    }
    const auto t1 = Clock::now();

    if (!shared.barrier.arrive_and_wait()) fail_with_dead_slave(shared, 0, iteration);
    const auto t2 = Clock::now();

    int received = 0;
    for (int id = 1; id <= k; ++id) {
      const auto slot = static_cast<std::size_t>(id - 1);
      std::optional<ResultMsg> msg = shared.to_master[slot].receive();
      if (!msg) fail_with_dead_slave(shared, id, iteration);
      if (msg->iteration_index != iteration || msg->slave_id != id) ++stats.ordering_violations;
      if (payload_checksum(msg->payload) != msg->checksum) ++stats.checksum_failures;
      ++received;
    }
    for (auto& ch : shared.to_slave) ch.wait_drained();
    const auto t3 = Clock::now();

    if (received != k) ++stats.ordering_violations;
    stats.results_delivered += static_cast<std::uint64_t>(received);
    suspend_us(spec.evaluate_suspension_us);
    const auto t4 = Clock::now();

    IterationTimeline t;
    t.send_total = since(t0, t1);
    t.work_span = since(t1, t2);
    t.receive_total = since(t2, t3);
    t.evaluate_total = since(t3, t4);
    // Latency is not separable from the phases on a wall clock.
    t.latency_total = 0.0;
    t.iteration_elapsed = since(t0, t4);
    result.per_iteration.push_back(t);
  }

  joiner.completed = true;
  for (auto& w : workers) w.join();
  const auto run_end = Clock::now();

  stats.ordering_violations += shared.ordering_violations.load();
  stats.checksum_failures += shared.checksum_failures.load();
  stats.orders_delivered = shared.orders_delivered.load();

  if (spec.nominal) {
    result.params = *spec.nominal;
  } else {
    result.params.slaves = k;
    result.params.evaluate_time = static_cast<double>(spec.evaluate_suspension_us) * 1e-6;
    // Zero work is not a valid cost description; charge one microsecond.
    const auto work_us = std::max<std::int64_t>(spec.work_suspension_us, 1);
    result.params.work = static_cast<double>(k * work_us) * 1e-6;
  }
  result.iterations = spec.iterations;
  result.total_elapsed = since(run_start, run_end);
  result.protocol = stats;
  finalize_means(result);
  return result;
}

Seconds calibrate_send_cost(std::size_t message_length, int trials) {
  if (message_length < 1) throw ValidationError("message length must be >= 1 byte");
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (message_length > kMaxPayload) throw ValidationError("message length above 1 GiB");

  const Bytes ping_bytes = make_payload(message_length, 7, 0);
  const Bytes pong_bytes = make_payload(message_length, 7, 1);
  const std::uint64_t ping_sum = payload_checksum(ping_bytes);
  const std::uint64_t pong_sum = payload_checksum(pong_bytes);

  Channel<Order> there;
  Channel<Order> back;
  std::thread echo([&] {
    while (auto msg = there.receive()) {
      (void)payload_checksum(msg->payload);
      if (!back.send(Order{pong_bytes, pong_sum, msg->iteration_index})) return;
    }
  });

  std::vector<Seconds> one_way;
  one_way.reserve(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    const auto start = Clock::now();
    there.send(Order{ping_bytes, ping_sum, i});
    auto reply = back.receive();
    (void)payload_checksum(reply->payload);
    one_way.push_back(since(start, Clock::now()) / 2.0);
  }
  there.close();
  echo.join();

  const auto mid = one_way.begin() + static_cast<std::ptrdiff_t>(one_way.size() / 2);
  std::nth_element(one_way.begin(), mid, one_way.end());
  if (one_way.size() % 2 == 1) return *mid;
  const Seconds upper = *mid;
  const Seconds lower = *std::max_element(one_way.begin(), mid);
  return 0.5 * (lower + upper);
}

std::size_t TransferModel::bytes_for(Seconds cost) const {
  if (!(cost > 0.0)) return 1;
  const double bytes = std::round(cost * bytes_per_second);
  return static_cast<std::size_t>(std::clamp(bytes, 1.0, static_cast<double>(kMaxPayload)));
}

TransferModel calibrate_transfer_model(int trials, std::size_t probe_length) {
  TransferModel model;
  model.fixed = calibrate_send_cost(1, trials);
  const Seconds probe = calibrate_send_cost(probe_length, trials);
  const Seconds per_bytes = probe > model.fixed ? probe - model.fixed : probe;
  model.bytes_per_second = static_cast<double>(probe_length) / per_bytes;
  return model;
}

LiveRunSpec live_spec_from_params(const BsfParams& params, int iterations, std::uint64_t seed,
                                  const TransferModel& transfer, std::int64_t min_suspension_us) {
  params.validate();
  const auto to_us = [&](Seconds s) -> std::int64_t {
    const auto us = static_cast<std::int64_t>(std::llround(s * 1e6));
    return us > 0 ? std::max(us, min_suspension_us) : 0;
  };
  LiveRunSpec spec;
  spec.slaves = params.slaves;
  spec.iterations = iterations;
  spec.order_length = transfer.bytes_for(params.send_time);
  spec.result_length = transfer.bytes_for(params.receive_time / params.slaves);
  spec.work_suspension_us = to_us(params.per_slave_work());
  spec.evaluate_suspension_us = to_us(params.evaluate_time);
  spec.seed = seed;
  spec.nominal = params;
  return spec;
}

}  // namespace bsf
