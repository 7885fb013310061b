#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace doorcount {

/// Depth sample in millimeters. Zero means the sensor returned nothing.
using DepthMm = std::uint16_t;

inline constexpr DepthMm kNoDepth = 0;

struct FrameDims {
    std::uint32_t width = 640;
    std::uint32_t height = 480;
};

/// One overhead depth frame, row-major.
struct DepthFrame {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint64_t frame_index = 0;
    std::uint64_t timestamp_us = 0;
    std::vector<DepthMm> depth;

    DepthFrame() = default;
    DepthFrame(std::uint32_t w, std::uint32_t h, std::uint64_t index = 0, std::uint64_t ts_us = 0,
               DepthMm fill = kNoDepth)
        : width(w), height(h), frame_index(index), timestamp_us(ts_us),
          depth(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
    bool well_formed() const { return depth.size() == pixel_count(); }

    DepthMm at(std::uint32_t x, std::uint32_t y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
    DepthMm& at(std::uint32_t x, std::uint32_t y) { return depth[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const DepthFrame&, const DepthFrame&) = default;
};

/// Thrown when a layout or segmentation setting is unusable. Raised at
/// startup, never from the per-frame path.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SegmentationConfig {
    std::uint32_t threshold_mm = 1000;
    double min_area_frac = 0.01;
    std::uint32_t debounce_frames = 1;

    void validate() const;
};

struct Rect {
    std::uint32_t x = 0;
    std::uint32_t y = 0;
    std::uint32_t w = 0;
    std::uint32_t h = 0;

    std::uint64_t area() const { return static_cast<std::uint64_t>(w) * h; }
    bool contains(std::uint32_t px, std::uint32_t py) const {
        return px >= x && px - x < w && py >= y && py - y < h;
    }
    bool intersects(const Rect& o) const;
    // Twice the center coordinate, to keep ordering checks in integers.
    std::uint64_t center2_x() const { return 2ull * x + w; }
    std::uint64_t center2_y() const { return 2ull * y + h; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Direction a person walks through the doorway, as seen in the image.
/// `horizontal` means motion along x (bands are vertical strips).
enum class CrossingAxis { horizontal, vertical };

/// Three disjoint bands. Index 0 is ROI 1 (inside), index 2 is ROI 3
/// (outside); centers increase along the crossing axis.
struct RoiLayout {
    std::array<Rect, 3> rois{};
    CrossingAxis crossing_axis = CrossingAxis::horizontal;

    /// Equal bands spanning the whole frame, stacked along `axis`. The last
    /// band absorbs the remainder when the extent is not divisible by 3.
    static RoiLayout bands(std::uint32_t width, std::uint32_t height,
                           CrossingAxis axis = CrossingAxis::horizontal);

    /// Throws ConfigError if any rectangle is empty, leaves the frame,
    /// overlaps another, or the centers are not strictly ordered.
    void validate(std::uint32_t width, std::uint32_t height) const;

    friend bool operator==(const RoiLayout&, const RoiLayout&) = default;
};

/// Dominant ROI of a frame. Values match the ROI ids; Idle means no ROI
/// holds enough foreground.
enum class RoiState : std::uint8_t { Idle = 0, Roi1 = 1, Roi2 = 2, Roi3 = 3 };

inline int to_int(RoiState s) { return static_cast<int>(s); }
RoiState roi_state_from_int(int v);  // throws std::out_of_range outside 0..3

using RoiCounts = std::array<std::uint32_t, 3>;

struct RoiActivation {
    std::uint64_t frame_index = 0;
    RoiCounts fg_px{};
    /// Published (debounced) state; this is what the counter consumes.
    RoiState dominant = RoiState::Idle;
    /// Undebounced argmax of this frame.
    RoiState raw_dominant = RoiState::Idle;
    /// Debounce bookkeeping: candidate state and how many consecutive frames
    /// it has been observed.
    RoiState pending = RoiState::Idle;
    std::uint32_t pending_run = 0;

    friend bool operator==(const RoiActivation&, const RoiActivation&) = default;
};

struct BinaryMask {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1, row-major

    bool at(std::uint32_t x, std::uint32_t y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
};

struct GrayImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Foreground iff 0 < depth <= threshold_mm.
inline bool is_foreground(DepthMm d, std::uint32_t threshold_mm) { return d != kNoDepth && d <= threshold_mm; }

BinaryMask segment_foreground(const DepthFrame& frame, const SegmentationConfig& cfg);

/// Nearer is brighter: round(255 * (1 - depth / threshold)) for foreground,
/// 0 for background. Display only.
GrayImage render_grayscale(const DepthFrame& frame, const SegmentationConfig& cfg);
std::uint8_t gray_level(DepthMm d, std::uint32_t threshold_mm);

RoiCounts roi_counts(const BinaryMask& mask, const RoiLayout& layout);

/// Segments and counts in one pass, touching only pixels inside the ROIs.
RoiCounts roi_foreground_counts(const DepthFrame& frame, const RoiLayout& layout, const SegmentationConfig& cfg);

/// Smallest foreground count that makes ROI `i` eligible (never below 1).
std::uint64_t min_eligible_pixels(const RoiLayout& layout, const SegmentationConfig& cfg, std::size_t i);

RoiState dominant_roi(const RoiCounts& counts, const RoiLayout& layout, const SegmentationConfig& cfg,
                      RoiState prev_dominant);

/// One pipeline step. `prev` is empty at stream start, in which case the raw
/// state is published immediately.
RoiActivation process_frame(const DepthFrame& frame, const RoiLayout& layout, const SegmentationConfig& cfg,
                            const std::optional<RoiActivation>& prev);

}  // namespace doorcount
