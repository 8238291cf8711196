#pragma once

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace bsf {

/// Ordered point-to-point message queue between two workers. Closing wakes
/// every waiter; receive() then drains what is left and returns nullopt.
template <typename T>
class Channel {
public:
  Channel() = default;
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  /// Returns false when the channel is closed; the message is dropped.
  bool send(T message) {
    {
      std::lock_guard lock(mutex_);
      if (closed_) return false;
      queue_.push_back(std::move(message));
    }
    ready_.notify_one();
    return true;
  }

  std::optional<T> receive() {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return !queue_.empty() || closed_; });
    if (queue_.empty()) return std::nullopt;
    T message = std::move(queue_.front());
    queue_.pop_front();
    if (queue_.empty()) drained_.notify_all();
    return message;
  }

  /// Blocks until every sent message has been taken by the receiver, or the
  /// channel is closed. Returns true when drained.
  bool wait_drained() {
    std::unique_lock lock(mutex_);
    drained_.wait(lock, [&] { return queue_.empty() || closed_; });
    return queue_.empty();
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    ready_.notify_all();
    drained_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
  }

private:
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::condition_variable drained_;
  std::deque<T> queue_;
  bool closed_ = false;
};

}  // namespace bsf
