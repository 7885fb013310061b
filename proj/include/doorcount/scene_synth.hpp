#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "doorcount/counting_fsm.hpp"
#include "doorcount/depth_pipeline.hpp"

namespace doorcount {

// Synthetic overhead scenes: a flat floor at camera height and a single
// flat disc (the head) that walks across the three bands.
//
// Random scheme (bit-exact, stable across builds):
//   frame_seed = mix64(rng_seed ^ mix64(t))       t = frame ordinal in scenario
//   engine     = std::mt19937_64(frame_seed)
//   per pixel, row-major, one 64-bit draw x:
//     dropout  if (x & 0xffffffff) < floor(dropout_prob * 2^32)   (all pixels when dropout_prob == 1)
//     noise    z = Phi^-1((((x >> 32) & 0xffff) + 0.5) / 65536)
//              depth = clamp(round_half_away(analytic + noise_sigma_mm * z), 1, 65535)
//   mix64 is the SplitMix64 finalizer. No draws happen when sigma and
//   dropout are both zero, so clean frames equal their analytic values.

enum class ScenarioKind : std::uint8_t { Entry, Exit, RegretEnter, RegretExit, Loiter, EmptyScene };

inline constexpr std::array<ScenarioKind, 6> kAllScenarioKinds{ScenarioKind::Entry,      ScenarioKind::Exit,
                                                              ScenarioKind::RegretEnter, ScenarioKind::RegretExit,
                                                              ScenarioKind::Loiter,      ScenarioKind::EmptyScene};

std::string_view to_string(ScenarioKind k);
std::optional<ScenarioKind> scenario_kind_from_string(std::string_view s);

inline constexpr std::uint64_t kFramePeriodUs = 33'333;

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Entry;
    std::uint32_t frame_count = 0;
    std::uint32_t camera_height_mm = 2200;
    std::uint32_t person_height_mm = 1700;
    std::uint32_t head_radius_px = 40;
    double speed_px_per_frame = 8.0;
    std::uint32_t start_offset_px = 10;
    double noise_sigma_mm = 0.0;
    double dropout_prob = 0.0;
    std::uint64_t rng_seed = 0;
};

struct ScenarioExpectation {
    std::uint64_t entries = 0;
    std::uint64_t exits = 0;
    std::uint64_t regret_enter = 0;
    std::uint64_t regret_exit = 0;

    static ScenarioExpectation for_kind(ScenarioKind k);
    std::uint64_t total() const { return entries + exits + regret_enter + regret_exit; }
    bool matches(const Counts& c) const {
        return c.entries == entries && c.exits == exits && c.regret_enter == regret_enter &&
               c.regret_exit == regret_exit;
    }
    ScenarioExpectation& operator+=(const ScenarioExpectation& o);
    friend bool operator==(const ScenarioExpectation&, const ScenarioExpectation&) = default;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Scenario {
    ScenarioSpec spec;
    std::vector<DepthFrame> frames;
    ScenarioExpectation expectation;
};

/// Renders the frames of one scenario on demand. Construction validates the
/// geometry; frame(t) is pure and may be called in any order.
class ScenarioRenderer {
public:
    ScenarioRenderer(const ScenarioSpec& spec, const RoiLayout& layout, FrameDims dims);

    std::uint32_t frame_count() const { return spec_.frame_count; }
    const ScenarioSpec& spec() const { return spec_; }
    ScenarioExpectation expectation() const { return ScenarioExpectation::for_kind(spec_.kind); }

    /// Frame t with frame_index = t and timestamp t * kFramePeriodUs.
    DepthFrame frame(std::uint32_t t) const;
    /// Disc center along the crossing axis at frame t; empty for EmptyScene.
    std::optional<double> head_position(std::uint32_t t) const;
    std::uint32_t head_depth_mm() const { return spec_.camera_height_mm - spec_.person_height_mm; }
    /// Frames until the disc reaches its final resting point (1 if static).
    std::uint32_t trajectory_frames() const { return needed_; }

private:
    ScenarioSpec spec_;
    RoiLayout layout_;
    FrameDims dims_;
    double start_ = 0;   // trajectory start along the crossing axis
    double turn_ = 0;    // farthest point reached (end for full crossings)
    bool returns_ = false;
    std::uint32_t needed_ = 1;
    double lateral_ = 0;  // disc center across the crossing axis
};

/// Frames needed for the trajectory of `spec` to run to completion.
std::uint32_t required_frame_count(const ScenarioSpec& spec, const RoiLayout& layout, FrameDims dims);

/// Fills frame_count when it is zero: the trajectory plus a short idle tail
/// for moving kinds, 30 frames for Loiter and EmptyScene.
ScenarioSpec with_auto_frame_count(ScenarioSpec spec, const RoiLayout& layout, FrameDims dims);

Scenario generate(const ScenarioSpec& spec, const RoiLayout& layout, FrameDims dims);

/// n_per_kind specs per kind, interleaved by kind, with speed, offset and
/// noise seed varied deterministically from `seed`. Frame counts are filled
/// automatically.
std::vector<ScenarioSpec> plan_suite(std::uint32_t n_per_kind, const ScenarioSpec& base, std::uint64_t seed,
                                     const RoiLayout& layout, FrameDims dims);

std::vector<Scenario> generate_suite(std::uint32_t n_per_kind, const ScenarioSpec& base, std::uint64_t seed,
                                     const RoiLayout& layout, FrameDims dims);

}  // namespace doorcount
