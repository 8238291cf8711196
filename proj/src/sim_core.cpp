#include "bsf/sim_core.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace bsf {

std::string_view to_string(Engine engine) {
  return engine == Engine::Virtual ? "virtual" : "live";
}

std::string_view to_string(LatencyMode mode) {
  return mode == LatencyMode::Serialized ? "serialized" : "pipelined";
}

Engine parse_engine(std::string_view text) {
  if (text == "virtual") return Engine::Virtual;
  if (text == "live") return Engine::Live;
  throw ValidationError("engine must be one of {virtual, live}, got '" + std::string(text) + "'");
}

LatencyMode parse_latency_mode(std::string_view text) {
  if (text == "serialized") return LatencyMode::Serialized;
  if (text == "pipelined") return LatencyMode::Pipelined;
  throw ValidationError("latency_mode must be one of {serialized, pipelined}, got '" +
                        std::string(text) + "'");
}

std::string_view to_string(SimEvent::Kind kind) {
  switch (kind) {
    case SimEvent::Kind::OrderSent: return "order_sent";
    case SimEvent::Kind::OrderArrived: return "order_arrived";
    case SimEvent::Kind::WorkDone: return "work_done";
    case SimEvent::Kind::BarrierReleased: return "barrier_released";
    case SimEvent::Kind::ResultArrived: return "result_arrived";
    case SimEvent::Kind::ReceiveDone: return "receive_done";
    case SimEvent::Kind::EvaluateStart: return "evaluate_start";
    case SimEvent::Kind::EvaluateDone: return "evaluate_done";
  }
  return "unknown";
}

void RunSpec::validate() const {
  params.validate();
  if (iterations < 1) {
    throw ValidationError("iterations must be >= 1, got " + std::to_string(iterations));
  }
  if (!(init_cost >= 0.0) || !(final_cost >= 0.0)) {
    throw ValidationError("init_cost and final_cost must be >= 0");
  }
}

namespace {

struct Pending {
  SimEvent event;
  std::uint64_t seq = 0;
};

struct Later {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.event.time != b.event.time) return a.event.time > b.event.time;
    return a.seq > b.seq;
  }
};

// Runs one macro-step cycle starting at `start` and returns its timeline.
class IterationLoop {
public:
  IterationLoop(const BsfParams& params, LatencyMode mode, std::vector<SimEvent>* trace)
      : p_(params), mode_(mode), trace_(trace) {}

  IterationTimeline run(int iteration, Seconds start) {
    iteration_ = iteration;
    work_done_ = 0;
    results_in_ = 0;
    send_phase_end_ = start;
    end_ = start;

    // Macro-step 1: the master pushes K orders. In serialized mode each send
    // blocks for the order's latency leg before the next one starts.
    Seconds master = start;
    for (int slave = 1; slave <= p_.slaves; ++slave) {
      const Seconds sent = master + p_.send_time;
      const Seconds arrived = sent + p_.latency;
      schedule({sent, SimEvent::Kind::OrderSent, iteration, slave});
      schedule({arrived, SimEvent::Kind::OrderArrived, iteration, slave});
      master = mode_ == LatencyMode::Serialized ? arrived : sent;
    }
    send_phase_end_ = master;

    while (!queue_.empty()) {
      const SimEvent ev = queue_.top().event;
      queue_.pop();
      if (trace_ != nullptr) trace_->push_back(ev);
      handle(ev);
    }

    IterationTimeline t;
    t.send_total = p_.slaves * p_.send_time;
    t.latency_total = mode_ == LatencyMode::Serialized ? 2.0 * p_.slaves * p_.latency
                                                       : 2.0 * p_.latency;
    t.work_span = p_.per_slave_work();
    t.receive_total = p_.receive_time;
    t.evaluate_total = p_.evaluate_time;
    t.iteration_elapsed = end_ - start;
    return t;
  }

  Seconds end_time() const { return end_; }

private:
  void schedule(SimEvent ev) { queue_.push({ev, seq_++}); }

  void handle(const SimEvent& ev) {
    using K = SimEvent::Kind;
    switch (ev.kind) {
      case K::OrderSent:
        break;
      case K::OrderArrived:
        schedule({ev.time + p_.per_slave_work(), K::WorkDone, iteration_, ev.slave});
        break;
      case K::WorkDone:
        // The master reaches the barrier once its send phase is over.
        if (++work_done_ == p_.slaves) {
          schedule({std::max(ev.time, send_phase_end_), K::BarrierReleased, iteration_, 0});
        }
        break;
      case K::BarrierReleased:
        // Macro-step 3: result legs. Serialized mode receives one slave at a time.
        for (int slave = 1; slave <= p_.slaves; ++slave) {
          const Seconds arrived = mode_ == LatencyMode::Serialized
                                      ? ev.time + slave * p_.latency
                                      : ev.time + p_.latency;
          schedule({arrived, K::ResultArrived, iteration_, slave});
        }
        break;
      case K::ResultArrived:
        if (++results_in_ == p_.slaves) {
          schedule({ev.time + p_.receive_time, K::ReceiveDone, iteration_, 0});
        }
        break;
      case K::ReceiveDone:
        schedule({ev.time, K::EvaluateStart, iteration_, 0});
        break;
      case K::EvaluateStart:
        schedule({ev.time + p_.evaluate_time, K::EvaluateDone, iteration_, 0});
        break;
      case K::EvaluateDone:
        end_ = ev.time;
        break;
    }
  }

  const BsfParams& p_;
  LatencyMode mode_;
  std::vector<SimEvent>* trace_;
  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  std::uint64_t seq_ = 0;
  int iteration_ = 0;
  int work_done_ = 0;
  int results_in_ = 0;
  Seconds send_phase_end_ = 0.0;
  Seconds end_ = 0.0;
};

SimulationResult run_virtual_impl(const RunSpec& spec, std::vector<SimEvent>* trace) {
  spec.validate();

  SimulationResult result;
  result.engine = Engine::Virtual;
  result.latency_mode = spec.latency_mode;
  result.params = spec.params;
  result.per_iteration.reserve(static_cast<std::size_t>(spec.iterations));

  IterationLoop loop(spec.params, spec.latency_mode, trace);
  Seconds clock = spec.init_cost;
  for (int i = 1; i <= spec.iterations; ++i) {
    const IterationTimeline t = loop.run(i, clock);
    result.per_iteration.push_back(t);
    clock = loop.end_time();
    if (spec.keep_going && !spec.keep_going(i, t)) break;
  }
  result.iterations = static_cast<int>(result.per_iteration.size());
  result.total_elapsed = clock + spec.final_cost;
  finalize_means(result);
  return result;
}

void check_comparable(const SimulationResult& base, const SimulationResult& run) {
  if (base.params.slaves != 1) {
    throw ValidationError("baseline run must use k = 1, got " +
                          std::to_string(base.params.slaves));
  }
  if (base.engine != run.engine || base.latency_mode != run.latency_mode) {
    throw ValidationError("baseline and run use different engines or latency modes");
  }
  if (base.params != run.params.with_slaves(1)) {
    throw ValidationError("baseline and run parameters differ in more than k");
  }
  if (!(base.mean_iteration > 0.0) || !(run.mean_iteration > 0.0)) {
    throw ValidationError("mean iteration time must be > 0");
  }
}

}  // namespace

void finalize_means(SimulationResult& result) {
  Seconds sum = 0.0;
  for (const auto& t : result.per_iteration) sum += t.iteration_elapsed;
  result.mean_iteration =
      result.per_iteration.empty() ? 0.0 : sum / static_cast<double>(result.per_iteration.size());
}

SimulationResult run_virtual(const RunSpec& spec) { return run_virtual_impl(spec, nullptr); }

SimulationResult run_virtual(const RunSpec& spec, std::vector<SimEvent>& trace) {
  return run_virtual_impl(spec, &trace);
}

double measured_speedup(const SimulationResult& base, const SimulationResult& run) {
  check_comparable(base, run);
  return base.mean_iteration / run.mean_iteration;
}

double measured_efficiency(const SimulationResult& base, const SimulationResult& run) {
  return measured_speedup(base, run) / run.params.slaves;
}

}  // namespace bsf
