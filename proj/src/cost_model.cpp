#include "bsf/cost_model.hpp"

#include <cmath>

namespace bsf {

namespace {

void require_non_negative(Seconds value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ValidationError(std::string(name) + " must be a finite value >= 0, got " +
                          std::to_string(value));
  }
}

// Per-slave communication charge on the master: 2L + t_s.
double communication_cost(const BsfParams& p) { return 2.0 * p.latency + p.send_time; }

}  // namespace

void BsfParams::validate() const {
  if (slaves < 1) {
    throw ValidationError("k must be >= 1, got " + std::to_string(slaves));
  }
  require_non_negative(latency, "latency");
  require_non_negative(send_time, "t_s");
  require_non_negative(receive_time, "t_r");
  require_non_negative(evaluate_time, "t_p");
  if (!std::isfinite(work) || work <= 0.0) {
    throw ValidationError("t_w must be a finite value > 0, got " + std::to_string(work));
  }
}

BsfParams BsfParams::scaled(double factor) const {
  BsfParams p = *this;
  p.latency *= factor;
  p.send_time *= factor;
  p.receive_time *= factor;
  p.evaluate_time *= factor;
  p.work *= factor;
  return p;
}

DerivedControls derive_controls(const BsfParams& params) {
  return {std::log10(params.work / params.send_time),
          params.evaluate_time + params.receive_time};
}

double scalability_bound(const BsfParams& params) {
  params.with_slaves(1).validate();
  const double comm = communication_cost(params);
  if (comm == 0.0) {
    throw std::domain_error("scalability bound undefined: 2L + t_s is zero");
  }
  return std::sqrt(params.work / comm);
}

double optimal_k(const BsfParams& params) { return scalability_bound(params); }

double speedup(const BsfParams& params) {
  params.validate();
  const double k = params.slaves;
  const double comm = communication_cost(params);
  const double master = params.receive_time + params.evaluate_time;
  return k * (comm + master + params.work) / (k * k * comm + k * master + params.work);
}

double efficiency_exact(const BsfParams& params) { return speedup(params) / params.slaves; }

double efficiency_approx(const BsfParams& params) {
  params.validate();
  const double k = params.slaves;
  const double overhead =
      k * k * communication_cost(params) + k * (params.receive_time + params.evaluate_time);
  return 1.0 / (1.0 + overhead / params.work);
}

BsfParams params_from_v(double v, const BsfParams& base) {
  if (!std::isfinite(v)) {
    throw ValidationError("v must be finite");
  }
  BsfParams p = base;
  p.send_time = std::pow(10.0, -v) * base.work;
  p.validate();
  return p;
}

BsfParams params_from_q(Seconds q, const BsfParams& base) {
  if (!std::isfinite(q) || q < base.receive_time) {
    throw ValidationError("q must be >= t_r (" + std::to_string(base.receive_time) +
                          "), got " + std::to_string(q));
  }
  BsfParams p = base;
  p.evaluate_time = q - base.receive_time;
  p.validate();
  return p;
}

}  // namespace bsf
