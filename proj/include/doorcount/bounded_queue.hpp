#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>

namespace doorcount {

/// Single-producer / single-consumer handoff with a fixed capacity.
/// Live producers use push_drop_oldest and never block; offline producers
/// use push_wait and get backpressure instead.
template <class T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : cap_(capacity == 0 ? 1 : capacity) {}

    /// Returns how many queued items were discarded to make room (0 or 1),
    /// or 0 with the item discarded if the queue is closed.
    std::size_t push_drop_oldest(T v) {
        std::size_t dropped = 0;
        {
            std::lock_guard lk(m_);
            if (closed_) return 0;
            if (q_.size() >= cap_) {
                q_.pop_front();
                ++dropped_total_;
                dropped = 1;
            }
            q_.push_back(std::move(v));
        }
        not_empty_.notify_one();
        return dropped;
    }

    /// Blocks while full. False if the queue was closed first.
    bool push_wait(T v) {
        {
            std::unique_lock lk(m_);
            not_full_.wait(lk, [&] { return closed_ || q_.size() < cap_; });
            if (closed_) return false;
            q_.push_back(std::move(v));
        }
        not_empty_.notify_one();
        return true;
    }

    std::optional<T> pop_for(std::chrono::milliseconds d) {
        std::unique_lock lk(m_);
        if (!not_empty_.wait_for(lk, d, [&] { return closed_ || !q_.empty(); })) return std::nullopt;
        if (q_.empty()) return std::nullopt;
        T v = std::move(q_.front());
        q_.pop_front();
        lk.unlock();
        not_full_.notify_one();
        return v;
    }

    /// Wakes all waiters; queued items can still be popped.
    void close() {
        {
            std::lock_guard lk(m_);
            closed_ = true;
        }
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    bool closed() const {
        std::lock_guard lk(m_);
        return closed_;
    }
    bool drained() const {
        std::lock_guard lk(m_);
        return closed_ && q_.empty();
    }
    std::size_t size() const {
        std::lock_guard lk(m_);
        return q_.size();
    }
    std::uint64_t dropped_total() const {
        std::lock_guard lk(m_);
        return dropped_total_;
    }
    std::size_t capacity() const { return cap_; }

private:
    const std::size_t cap_;
    mutable std::mutex m_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<T> q_;
    bool closed_ = false;
    std::uint64_t dropped_total_ = 0;
};

}  // namespace doorcount
