#include "doorcount/frame_source.hpp"

#include <thread>

namespace doorcount {

void Pacer::wait_for(std::uint64_t timestamp_us) {
    const auto now = std::chrono::steady_clock::now();
    if (!anchored_ || timestamp_us < anchor_ts_) {
        anchored_ = true;
        anchor_time_ = now;
        anchor_ts_ = timestamp_us;
        return;
    }
    std::this_thread::sleep_until(anchor_time_ + std::chrono::microseconds(timestamp_us - anchor_ts_));
}

ReplaySource::ReplaySource(const std::filesystem::path& path, bool paced)
    : path_(path), reader_(path), paced_(paced) {}

std::optional<DepthFrame> ReplaySource::next_frame() {
    if (done_) return std::nullopt;
    auto f = reader_.next();
    if (!f) {
        done_ = true;
        return std::nullopt;
    }
    if (paced_) pacer_.wait_for(f->timestamp_us);
    return f;
}

std::string ReplaySource::describe() const {
    return std::string("replay:") + path_.string() + (paced_ ? " (paced)" : " (unpaced)");
}

FrameDims ReplaySource::dims() const { return {reader_.header().width, reader_.header().height}; }

SyntheticSource::SyntheticSource(std::vector<ScenarioSpec> scenarios, const RoiLayout& layout, FrameDims dims,
                                 bool paced)
    : scenarios_(std::move(scenarios)), layout_(layout), dims_(dims), paced_(paced) {
    // Validate everything up front so geometry errors surface at startup.
    for (const ScenarioSpec& s : scenarios_) ScenarioRenderer(s, layout_, dims_);
}

std::optional<DepthFrame> SyntheticSource::next_frame() {
    while (scenario_ < scenarios_.size()) {
        if (!renderer_) {
            renderer_.emplace(scenarios_[scenario_], layout_, dims_);
            t_ = 0;
        }
        if (t_ < renderer_->frame_count()) {
            DepthFrame f = renderer_->frame(t_++);
            f.frame_index = next_index_;
            f.timestamp_us = next_index_ * kFramePeriodUs;
            ++next_index_;
            if (paced_) pacer_.wait_for(f.timestamp_us);
            return f;
        }
        renderer_.reset();
        ++scenario_;
    }
    return std::nullopt;
}

std::string SyntheticSource::describe() const {
    return "synthetic:" + std::to_string(scenarios_.size()) + " scenarios" + (paced_ ? " (paced)" : " (unpaced)");
}

ScenarioExpectation SyntheticSource::expectation() const {
    ScenarioExpectation e;
    for (const ScenarioSpec& s : scenarios_) e += ScenarioExpectation::for_kind(s.kind);
    return e;
}

std::uint64_t SyntheticSource::total_frames() const {
    std::uint64_t n = 0;
    for (const ScenarioSpec& s : scenarios_) n += s.frame_count;
    return n;
}

}  // namespace doorcount
