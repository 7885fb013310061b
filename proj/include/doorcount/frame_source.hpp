#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "doorcount/depth_pipeline.hpp"
#include "doorcount/replay_file.hpp"
#include "doorcount/scene_synth.hpp"

namespace doorcount {

/// Where frames come from. Implementations yield well-formed frames with
/// strictly increasing frame_index; once next_frame() returns empty it
/// keeps returning empty.
class FrameSource {
public:
    virtual ~FrameSource() = default;

    virtual std::optional<DepthFrame> next_frame() = 0;
    virtual std::string describe() const = 0;
    virtual FrameDims dims() const = 0;
    /// Live sources deliver frames at their timestamps' rate.
    virtual bool paced() const = 0;
    /// Forget the pacing reference, e.g. after the stream was paused.
    virtual void rebase_clock() {}
};

/// Sleeps so that frames are released at the rate their timestamps imply.
class Pacer {
public:
    void wait_for(std::uint64_t timestamp_us);
    void rebase() { anchored_ = false; }

private:
    bool anchored_ = false;
    std::chrono::steady_clock::time_point anchor_time_;
    std::uint64_t anchor_ts_ = 0;
};

class ReplaySource final : public FrameSource {
public:
    ReplaySource(const std::filesystem::path& path, bool paced);

    std::optional<DepthFrame> next_frame() override;
    std::string describe() const override;
    FrameDims dims() const override;
    bool paced() const override { return paced_; }
    void rebase_clock() override { pacer_.rebase(); }

private:
    std::filesystem::path path_;
    ReplayReader reader_;
    bool paced_;
    bool done_ = false;
    Pacer pacer_;
};

/// Plays a list of scenarios back to back. Frame indices and timestamps run
/// continuously across scenario boundaries.
class SyntheticSource final : public FrameSource {
public:
    SyntheticSource(std::vector<ScenarioSpec> scenarios, const RoiLayout& layout, FrameDims dims, bool paced);

    std::optional<DepthFrame> next_frame() override;
    std::string describe() const override;
    FrameDims dims() const override { return dims_; }
    bool paced() const override { return paced_; }
    void rebase_clock() override { pacer_.rebase(); }

    ScenarioExpectation expectation() const;
    std::uint64_t total_frames() const;

private:
    std::vector<ScenarioSpec> scenarios_;
    RoiLayout layout_;
    FrameDims dims_;
    bool paced_;
    std::size_t scenario_ = 0;
    std::uint32_t t_ = 0;
    std::uint64_t next_index_ = 0;
    std::optional<ScenarioRenderer> renderer_;
    Pacer pacer_;
};

}  // namespace doorcount
