#include "bsf/barrier.hpp"

#include <stdexcept>

namespace bsf {

Barrier::Barrier(int parties) : parties_(parties) {
  if (parties < 1) throw std::invalid_argument("barrier needs at least one party");
}

bool Barrier::arrive_and_wait() {
  std::unique_lock lock(mutex_);
  if (broken_) return false;
  const std::uint64_t phase = generation_;
  if (++waiting_ == parties_) {
    waiting_ = 0;
    ++generation_;
    lock.unlock();
    released_.notify_all();
    return true;
  }
  released_.wait(lock, [&] { return generation_ != phase || broken_; });
  return generation_ != phase;
}

void Barrier::break_barrier() {
  {
    std::lock_guard lock(mutex_);
    broken_ = true;
  }
  released_.notify_all();
}

bool Barrier::broken() const {
  std::lock_guard lock(mutex_);
  return broken_;
}

std::uint64_t Barrier::generation() const {
  std::lock_guard lock(mutex_);
  return generation_;
}

}  // namespace bsf
