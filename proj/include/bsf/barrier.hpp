#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>

namespace bsf {

/// Counted rendezvous for a fixed set of parties, reusable across phases.
/// Unlike std::barrier it can be broken, which releases every current and
/// future waiter with a failure result.
class Barrier {
public:
  explicit Barrier(int parties);

  Barrier(const Barrier&) = delete;
  Barrier& operator=(const Barrier&) = delete;

  /// Returns false if the barrier was broken before the phase completed.
  bool arrive_and_wait();

  void break_barrier();
  bool broken() const;

  /// Number of fully completed phases.
  std::uint64_t generation() const;

private:
  mutable std::mutex mutex_;
  std::condition_variable released_;
  const int parties_;
  int waiting_ = 0;
  std::uint64_t generation_ = 0;
  bool broken_ = false;
};

}  // namespace bsf
