#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "bsf/sim_core.hpp"

using namespace bsf;

namespace {

BsfParams table1(int k) {
  BsfParams p;
  p.slaves = k;
  p.latency = 2e-5;
  p.send_time = 0.005;
  p.receive_time = 0.01;
  p.evaluate_time = 4.99;
  p.work = 500.0;
  return p;
}

RunSpec spec_for(const BsfParams& p, int n = 1, LatencyMode mode = LatencyMode::Serialized) {
  RunSpec s;
  s.params = p;
  s.iterations = n;
  s.latency_mode = mode;
  return s;
}

// Per-iteration time of the serialized timeline, written out independently.
double closed_form(const BsfParams& p) {
  const double k = p.slaves;
  return k * (2 * p.latency + p.send_time) + p.receive_time + p.evaluate_time + p.work / k;
}

}  // namespace

TEST_CASE("work-only iteration") {
  BsfParams p;
  p.work = 7.0;
  const SimulationResult r = run_virtual(spec_for(p));
  REQUIRE(r.per_iteration.size() == 1);
  CHECK(r.per_iteration[0].iteration_elapsed == 7.0);
  CHECK(r.mean_iteration == 7.0);
  CHECK(r.engine == Engine::Virtual);
  CHECK_FALSE(r.protocol.has_value());
}

TEST_CASE("serialized iteration matches the closed form") {
  const SimulationResult r = run_virtual(spec_for(table1(4)));
  const IterationTimeline& t = r.per_iteration.at(0);
  // 4 * 0.00504 + 5.0 + 125
  CHECK(t.iteration_elapsed == doctest::Approx(130.02016).epsilon(1e-14));
  CHECK(t.send_total == doctest::Approx(0.02));
  CHECK(t.latency_total == doctest::Approx(8 * 2e-5));
  CHECK(t.work_span == 125.0);
  CHECK(t.receive_total == 0.01);
  CHECK(t.evaluate_total == 4.99);
}

TEST_CASE("virtual clock is linear in the iteration count") {
  RunSpec s = spec_for(table1(4), 3);
  s.init_cost = 1.5;
  s.final_cost = 0.25;
  const SimulationResult r = run_virtual(s);
  CHECK(r.iterations == 3);
  CHECK(r.per_iteration.size() == 3);
  CHECK(r.total_elapsed == doctest::Approx(3 * 130.02016 + 1.75).epsilon(1e-14));
  const double min_iter =
      std::min_element(r.per_iteration.begin(), r.per_iteration.end(),
                       [](auto& a, auto& b) { return a.iteration_elapsed < b.iteration_elapsed; })
          ->iteration_elapsed;
  CHECK(r.total_elapsed >= 3 * min_iter);
}

TEST_CASE("measured speedup and efficiency") {
  const SimulationResult base = run_virtual(spec_for(table1(1), 10));
  CHECK(measured_speedup(base, base) == 1.0);
  CHECK(measured_efficiency(base, base) == 1.0);

  const SimulationResult at100 = run_virtual(spec_for(table1(100), 10));
  CHECK(measured_speedup(base, at100) == doctest::Approx(48.0774028941356).epsilon(1e-9));
  CHECK(measured_efficiency(base, at100) == doctest::Approx(0.480774028941356).epsilon(1e-9));

  BsfParams free;
  free.work = 8.0;
  const SimulationResult free1 = run_virtual(spec_for(free, 4));
  const SimulationResult free8 = run_virtual(spec_for(free.with_slaves(8), 4));
  CHECK(free8.mean_iteration == 1.0);
  CHECK(measured_speedup(free1, free8) == 8.0);
  CHECK(measured_efficiency(free1, free8) == 1.0);
}

TEST_CASE("measured speedup rejects mismatched runs") {
  const SimulationResult base = run_virtual(spec_for(table1(1)));
  BsfParams other = table1(4);
  other.evaluate_time = 1.0;
  CHECK_THROWS_AS(measured_speedup(base, run_virtual(spec_for(other))), ValidationError);
  const SimulationResult pipelined =
      run_virtual(spec_for(table1(4), 1, LatencyMode::Pipelined));
  CHECK_THROWS_AS(measured_speedup(base, pipelined), ValidationError);
  const SimulationResult k4 = run_virtual(spec_for(table1(4)));
  CHECK_THROWS_AS(measured_speedup(k4, k4), ValidationError);
}

TEST_CASE("invalid run specs are rejected") {
  CHECK_THROWS_AS(run_virtual(spec_for(table1(0))), ValidationError);
  RunSpec s = spec_for(table1(2), 0);
  CHECK_THROWS_AS(run_virtual(s), ValidationError);
  s = spec_for(table1(2));
  s.init_cost = -1.0;
  CHECK_THROWS_AS(run_virtual(s), ValidationError);
}

TEST_CASE("serialized runs reproduce the analytical speedup over random grids") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-6, 1);
  for (int i = 0; i < 300; ++i) {
    BsfParams p;
    p.slaves = std::uniform_int_distribution<int>(1, 300)(rng);
    p.latency = std::pow(10.0, u(rng) - 2);
    p.send_time = std::pow(10.0, u(rng));
    p.receive_time = std::pow(10.0, u(rng));
    p.evaluate_time = std::pow(10.0, u(rng));
    p.work = std::pow(10.0, u(rng) + 3);
    const auto base = run_virtual(spec_for(p.with_slaves(1), 3));
    const auto run = run_virtual(spec_for(p, 3));
    CHECK(run.per_iteration[0].iteration_elapsed ==
          doctest::Approx(closed_form(p)).epsilon(1e-12));
    const double expected = speedup(p);
    CHECK(std::abs(measured_speedup(base, run) - expected) < 1e-9 * expected);
  }
}

TEST_CASE("pipelined latency saves exactly (K-1) * 2L per iteration") {
  for (int k : {1, 2, 7, 64, 315}) {
    const BsfParams p = table1(k);
    const auto serial = run_virtual(spec_for(p, 2));
    const auto piped = run_virtual(spec_for(p, 2, LatencyMode::Pipelined));
    for (int i = 0; i < 2; ++i) {
      const double gap =
          serial.per_iteration[i].iteration_elapsed - piped.per_iteration[i].iteration_elapsed;
      CHECK(piped.per_iteration[i].iteration_elapsed <= serial.per_iteration[i].iteration_elapsed);
      CHECK(gap == doctest::Approx((k - 1) * 2 * p.latency).epsilon(1e-6).scale(1e-9));
    }
  }
}

TEST_CASE("identical specs give identical results") {
  const RunSpec s = spec_for(table1(17), 5, LatencyMode::Pipelined);
  CHECK(run_virtual(s) == run_virtual(s));
}

TEST_CASE("evaluation never starts before every result arrived") {
  for (LatencyMode mode : {LatencyMode::Serialized, LatencyMode::Pipelined}) {
    const int k = 9;
    std::vector<SimEvent> trace;
    run_virtual(spec_for(table1(k), 4, mode), trace);
    CHECK_FALSE(trace.empty());
    int results = 0;
    int work_done = 0;
    int iteration = 1;
    double last_time = -1.0;
    for (const SimEvent& ev : trace) {
      CHECK(ev.time >= last_time);
      last_time = ev.time;
      CHECK(ev.iteration == iteration);
      switch (ev.kind) {
        case SimEvent::Kind::WorkDone: ++work_done; break;
        case SimEvent::Kind::BarrierReleased: CHECK(work_done == k); break;
        case SimEvent::Kind::ResultArrived: ++results; break;
        case SimEvent::Kind::EvaluateStart: CHECK(results == k); break;
        case SimEvent::Kind::EvaluateDone:
          results = 0;
          work_done = 0;
          ++iteration;
          break;
        default: break;
      }
    }
    CHECK(iteration == 5);
  }
}

TEST_CASE("continue predicate stops early") {
  RunSpec s = spec_for(table1(2), 10);
  s.keep_going = [](int i, const IterationTimeline&) { return i < 4; };
  const auto r = run_virtual(s);
  CHECK(r.iterations == 4);
  CHECK(r.per_iteration.size() == 4);
}

TEST_CASE("enum text round-trips") {
  CHECK(parse_engine(to_string(Engine::Live)) == Engine::Live);
  CHECK(parse_latency_mode(to_string(LatencyMode::Pipelined)) == LatencyMode::Pipelined);
  CHECK_THROWS_AS(parse_engine("mpi"), ValidationError);
}
