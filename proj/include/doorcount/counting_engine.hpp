#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "doorcount/counting_fsm.hpp"
#include "doorcount/depth_pipeline.hpp"
#include "doorcount/logs.hpp"
#include "doorcount/snapshot.hpp"

namespace doorcount {

struct EngineConfig {
    RoiLayout layout;
    SegmentationConfig segmentation;
    std::uint32_t idle_timeout_frames = kDefaultIdleTimeoutFrames;
    std::int64_t initial_occupancy = 0;
};

/// File layout of a log directory.
struct LogPaths {
    std::filesystem::path analysis;   // <dir>/analysis.csv
    std::filesystem::path events;     // <dir>/events.jsonl
    std::filesystem::path snapshots;  // <dir>/snapshots/

    static LogPaths under(const std::filesystem::path& dir);
};

/// Per-frame counting loop body shared by the offline `count` command and
/// the service: pipeline step, state machine step, then the sinks.
///
/// A fresh engine truncates the logs it is given; a run owns its log
/// directory. Sink failures set degraded() and never stop counting.
class CountingEngine {
public:
    CountingEngine(EngineConfig cfg, FrameDims dims, std::optional<LogPaths> logs = std::nullopt);

    /// Throws std::invalid_argument for a frame of the wrong size or out of order.
    std::optional<CrossingEvent> process(const DepthFrame& frame);

    void reset_counters();
    void clear_logs();
    void flush();

    const CounterState& state() const { return state_; }
    const std::optional<RoiActivation>& last_activation() const { return activation_; }
    std::uint64_t frames_processed() const { return frames_processed_; }
    std::uint64_t last_timestamp_us() const { return last_timestamp_us_; }
    std::optional<std::uint64_t> last_event_seq() const { return last_event_seq_; }
    bool degraded() const { return degraded_; }
    const std::string& last_sink_error() const { return last_sink_error_; }
    const EngineConfig& config() const { return cfg_; }
    const SnapshotStore* snapshots() const { return snapshots_ ? &*snapshots_ : nullptr; }

private:
    void sink_failed(const std::string& what);

    EngineConfig cfg_;
    FrameDims dims_;
    CounterState state_;
    std::optional<RoiActivation> activation_;
    std::uint64_t frames_processed_ = 0;
    std::uint64_t last_timestamp_us_ = 0;
    std::optional<std::uint64_t> last_event_seq_;
    std::unique_ptr<AnalysisLog> analysis_;
    std::unique_ptr<EventLog> events_;
    std::optional<SnapshotStore> snapshots_;
    bool degraded_ = false;
    std::string last_sink_error_;
};

}  // namespace doorcount
