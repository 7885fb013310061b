#include "doorcount/counting_engine.hpp"

#include <stdexcept>

namespace doorcount {

LogPaths LogPaths::under(const std::filesystem::path& dir) {
    return {dir / "analysis.csv", dir / "events.jsonl", dir / "snapshots"};
}

CountingEngine::CountingEngine(EngineConfig cfg, FrameDims dims, std::optional<LogPaths> logs)
    : cfg_(std::move(cfg)), dims_(dims), state_(CounterState::initial(cfg_.initial_occupancy, cfg_.idle_timeout_frames)) {
    cfg_.segmentation.validate();
    cfg_.layout.validate(dims.width, dims.height);
    if (logs) {
        analysis_ = std::make_unique<AnalysisLog>(logs->analysis);
        events_ = std::make_unique<EventLog>(logs->events);
        snapshots_.emplace(logs->snapshots);
        clear_logs();
    }
}

void CountingEngine::sink_failed(const std::string& what) {
    degraded_ = true;
    last_sink_error_ = what;
}

std::optional<CrossingEvent> CountingEngine::process(const DepthFrame& frame) {
    if (frame.width != dims_.width || frame.height != dims_.height || !frame.well_formed())
        throw std::invalid_argument("frame " + std::to_string(frame.frame_index) + " does not match the configured " +
                                    std::to_string(dims_.width) + "x" + std::to_string(dims_.height) + " layout");

    activation_ = process_frame(frame, cfg_.layout, cfg_.segmentation, activation_);
    StepResult step = fsm_step(state_, activation_->dominant, frame.frame_index, frame.timestamp_us);
    state_ = step.state;
    ++frames_processed_;
    last_timestamp_us_ = frame.timestamp_us;

    if (analysis_) {
        try {
            analysis_->append(AnalysisRecord::from(*activation_));
        } catch (const std::exception& e) {
            sink_failed(e.what());
        }
    }
    if (!step.event) return std::nullopt;

    CrossingEvent& ev = *step.event;
    last_event_seq_ = ev.seq;
    if (snapshots_) {
        try {
            ev.snapshot_id = snapshots_->save(frame, cfg_.segmentation, ev.seq);
        } catch (const std::exception& e) {
            sink_failed(e.what());
        }
    }
    if (events_) {
        try {
            events_->append(ev);
        } catch (const std::exception& e) {
            sink_failed(e.what());
        }
    }
    return ev;
}

void CountingEngine::reset_counters() { state_ = reset(state_); }

void CountingEngine::clear_logs() {
    try {
        if (analysis_) analysis_->truncate();
        if (events_) events_->truncate();
        if (snapshots_) snapshots_->clear();
    } catch (const std::exception& e) {
        sink_failed(e.what());
    }
}

void CountingEngine::flush() {
    try {
        if (analysis_) analysis_->flush();
    } catch (const std::exception& e) {
        sink_failed(e.what());
    }
}

}  // namespace doorcount
