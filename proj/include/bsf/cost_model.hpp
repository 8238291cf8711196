#pragma once

#include <stdexcept>
#include <string>

namespace bsf {

/// Seconds, held as double everywhere in the model layer.
using Seconds = double;

/// Raised when a parameter set or configuration violates its contract.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Cost description of one master/slave workload on one machine.
 *
 * `work` is the summed slave work per iteration; the per-slave share is
 * derived on demand so `work == slaves * per_slave_work()` cannot drift.
 */
struct BsfParams {
  int slaves = 1;             // K
  Seconds latency = 0.0;      // one-byte message latency bound
  Seconds send_time = 0.0;    // master time to send one order to one slave
  Seconds receive_time = 0.0; // master time to receive all results
  Seconds evaluate_time = 0.0;// master time to evaluate all results
  Seconds work = 1.0;         // summed slave work, no parallelization

  Seconds per_slave_work() const { return work / slaves; }

  /// Throws ValidationError naming the first violated constraint.
  void validate() const;

  BsfParams with_slaves(int k) const {
    BsfParams p = *this;
    p.slaves = k;
    return p;
  }

  /// Every time field multiplied by `factor`; slave count unchanged.
  BsfParams scaled(double factor) const;

  bool operator==(const BsfParams&) const = default;
};

/// Log-ratio and combined-overhead controls used by the verification sweeps.
struct DerivedControls {
  double v = 0.0;     // lg(work / send_time)
  Seconds q = 0.0;    // evaluate_time + receive_time
};

DerivedControls derive_controls(const BsfParams& params);

/// sqrt(work / (2L + send_time)). K is ignored. Throws std::domain_error
/// when 2L + send_time == 0.
double scalability_bound(const BsfParams& params);

/// Continuous K maximizing speedup(); equal to scalability_bound().
double optimal_k(const BsfParams& params);

double speedup(const BsfParams& params);

double efficiency_exact(const BsfParams& params);

/// Approximation that drops the master overhead from the numerator.
double efficiency_approx(const BsfParams& params);

/// send_time = 10^-v * work; remaining fields taken from `base`.
BsfParams params_from_v(double v, const BsfParams& base);

/// evaluate_time = q - receive_time; remaining fields taken from `base`.
BsfParams params_from_q(Seconds q, const BsfParams& base);

}  // namespace bsf
