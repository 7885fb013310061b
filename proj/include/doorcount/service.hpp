#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "doorcount/bounded_queue.hpp"
#include "doorcount/counting_engine.hpp"
#include "doorcount/frame_source.hpp"
#include "doorcount/report.hpp"

namespace doorcount {

struct ServiceConfig {
    EngineConfig engine;
    std::optional<std::filesystem::path> log_dir;
    std::size_t queue_capacity = 4;
    bool autostart = true;
    /// Upper bound on in-memory event history served by /events.
    std::size_t event_history_limit = 100'000;
};

struct CountsSnapshot {
    Counts counts;
    std::uint64_t timestamp_us = 0;
};

/// Immutable view published by the processing loop.
struct ServiceStatus {
    bool running = false;
    bool finished = false;  // source reached end of stream or failed
    std::string source;
    std::uint64_t frames_produced = 0;
    std::uint64_t frames_processed = 0;
    std::uint64_t frames_dropped = 0;
    CountsSnapshot counts;
    std::uint64_t last_event_seq = 0;  // 0 when no event yet
    double fps_estimate = 0.0;
    bool occupancy_consistent = true;
    bool degraded = false;
    std::string last_error;
    std::string source_error;
};

enum class ControlAction { Start, Stop, Reset, ClearLogs };
std::optional<ControlAction> control_action_from_string(std::string_view s);

/// Runs a frame source through a CountingEngine on two threads: a producer
/// that pulls frames into a bounded queue and a consumer that owns the
/// engine. Paced (live) sources never block on a slow consumer; the oldest
/// queued frame is dropped instead. Unpaced sources get backpressure.
///
/// Control actions are applied by the consumer between frames. Status reads
/// return the latest published snapshot and never wait on frame processing.
class CounterService {
public:
    CounterService(ServiceConfig cfg, std::unique_ptr<FrameSource> source);
    ~CounterService();
    CounterService(const CounterService&) = delete;
    CounterService& operator=(const CounterService&) = delete;

    std::shared_ptr<const ServiceStatus> status() const;
    ServiceStatus control(ControlAction action);

    /// Events with seq > since_seq, oldest first, at most `limit`.
    std::vector<CrossingEvent> events_since(std::uint64_t since_seq, std::size_t limit) const;
    std::optional<std::vector<std::uint8_t>> snapshot(const std::string& id) const;
    Report report(std::uint64_t from_us, std::uint64_t to_us, std::uint64_t bucket_us) const;

    /// Blocks until the source is exhausted and every produced frame has been
    /// processed or dropped. False on timeout.
    bool wait_finished(std::chrono::milliseconds timeout) const;

    /// Frame dimensions of the source (layout already validated against them).
    FrameDims dims() const { return dims_; }

private:
    using Command = std::function<void(CountingEngine&)>;

    void producer_loop();
    void consumer_loop();
    void run_command(Command cmd);
    void publish(const std::function<void(ServiceStatus&)>& update);
    void publish_engine_state(double fps);

    ServiceConfig cfg_;
    std::unique_ptr<FrameSource> source_;
    FrameDims dims_;
    std::unique_ptr<CountingEngine> engine_;
    BoundedQueue<DepthFrame> queue_;

    // Producer control.
    mutable std::mutex run_m_;
    std::condition_variable run_cv_;
    bool running_ = false;
    bool producer_paused_ = true;
    bool shutdown_ = false;
    bool source_done_ = false;
    std::uint64_t produced_ = 0;
    std::uint64_t processed_ = 0;  // mirror of engine frames, for quiescence checks
    mutable std::condition_variable quiet_cv_;

    // Consumer mailbox.
    std::mutex cmd_m_;
    std::deque<std::pair<Command, std::promise<void>>> commands_;

    mutable std::mutex status_m_;
    std::shared_ptr<const ServiceStatus> status_;

    mutable std::mutex events_m_;
    std::deque<CrossingEvent> events_;

    std::thread producer_;
    std::thread consumer_;
};

std::string status_to_json(const ServiceStatus& s);
std::string counts_to_json(const CountsSnapshot& c);

}  // namespace doorcount
