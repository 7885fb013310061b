#include "doorcount/depth_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace doorcount {

void SegmentationConfig::validate() const {
    if (threshold_mm == 0) throw ConfigError("threshold_mm must be > 0");
    if (!(min_area_frac >= 0.0 && min_area_frac <= 1.0))
        throw ConfigError("min_area_frac must lie in [0, 1], got " + std::to_string(min_area_frac));
    if (debounce_frames == 0) throw ConfigError("debounce_frames must be >= 1");
}

bool Rect::intersects(const Rect& o) const {
    if (area() == 0 || o.area() == 0) return false;
    const auto x_overlap = std::uint64_t{x} < std::uint64_t{o.x} + o.w && std::uint64_t{o.x} < std::uint64_t{x} + w;
    const auto y_overlap = std::uint64_t{y} < std::uint64_t{o.y} + o.h && std::uint64_t{o.y} < std::uint64_t{y} + h;
    return x_overlap && y_overlap;
}

RoiLayout RoiLayout::bands(std::uint32_t width, std::uint32_t height, CrossingAxis axis) {
    const std::uint32_t extent = axis == CrossingAxis::horizontal ? width : height;
    if (extent < 3) throw ConfigError("frame too small for three bands");
    const std::uint32_t band = extent / 3;
    RoiLayout layout;
    layout.crossing_axis = axis;
    for (std::uint32_t i = 0; i < 3; ++i) {
        const std::uint32_t start = i * band;
        const std::uint32_t len = i == 2 ? extent - start : band;
        layout.rois[i] = axis == CrossingAxis::horizontal ? Rect{start, 0, len, height} : Rect{0, start, width, len};
    }
    return layout;
}

void RoiLayout::validate(std::uint32_t width, std::uint32_t height) const {
    for (std::size_t i = 0; i < 3; ++i) {
        const Rect& r = rois[i];
        const std::string name = "ROI " + std::to_string(i + 1);
        if (r.w == 0 || r.h == 0) throw ConfigError(name + " is empty");
        if (std::uint64_t{r.x} + r.w > width || std::uint64_t{r.y} + r.h > height)
            throw ConfigError(name + " lies outside the " + std::to_string(width) + "x" + std::to_string(height) +
                              " frame");
    }
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            if (rois[i].intersects(rois[j]))
                throw ConfigError("ROI " + std::to_string(i + 1) + " overlaps ROI " + std::to_string(j + 1));
    auto center = [&](const Rect& r) {
        return crossing_axis == CrossingAxis::horizontal ? r.center2_x() : r.center2_y();
    };
    if (!(center(rois[0]) < center(rois[1]) && center(rois[1]) < center(rois[2])))
        throw ConfigError("ROI centers must be strictly ordered 1 < 2 < 3 along the crossing axis");
}

RoiState roi_state_from_int(int v) {
    if (v < 0 || v > 3) throw std::out_of_range("ROI state out of range: " + std::to_string(v));
    return static_cast<RoiState>(v);
}

BinaryMask segment_foreground(const DepthFrame& frame, const SegmentationConfig& cfg) {
    BinaryMask mask{frame.width, frame.height, std::vector<std::uint8_t>(frame.depth.size())};
    const std::uint32_t t = cfg.threshold_mm;
    for (std::size_t i = 0; i < frame.depth.size(); ++i) mask.bits[i] = is_foreground(frame.depth[i], t) ? 1 : 0;
    return mask;
}

std::uint8_t gray_level(DepthMm d, std::uint32_t threshold_mm) {
    if (!is_foreground(d, threshold_mm)) return 0;
    // round-half-up of 255 * (t - d) / t in integers
    const std::uint64_t t = threshold_mm;
    const std::uint64_t num = 255ull * (t - d) * 2 + t;
    return static_cast<std::uint8_t>(num / (2 * t));
}

GrayImage render_grayscale(const DepthFrame& frame, const SegmentationConfig& cfg) {
    GrayImage img{frame.width, frame.height, std::vector<std::uint8_t>(frame.depth.size())};
    for (std::size_t i = 0; i < frame.depth.size(); ++i) img.pixels[i] = gray_level(frame.depth[i], cfg.threshold_mm);
    return img;
}

RoiCounts roi_counts(const BinaryMask& mask, const RoiLayout& layout) {
    RoiCounts counts{};
    for (std::size_t i = 0; i < 3; ++i) {
        const Rect& r = layout.rois[i];
        std::uint32_t n = 0;
        for (std::uint32_t y = r.y; y < r.y + r.h; ++y) {
            const std::uint8_t* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
            for (std::uint32_t x = r.x; x < r.x + r.w; ++x) n += row[x];
        }
        counts[i] = n;
    }
    return counts;
}

RoiCounts roi_foreground_counts(const DepthFrame& frame, const RoiLayout& layout, const SegmentationConfig& cfg) {
    RoiCounts counts{};
    // d - 1 wraps 0 to 65535, so one unsigned compare covers 0 < d <= t.
    const std::uint32_t limit = std::min<std::uint32_t>(cfg.threshold_mm, 65535);
    for (std::size_t i = 0; i < 3; ++i) {
        const Rect& r = layout.rois[i];
        std::uint32_t n = 0;
        for (std::uint32_t y = r.y; y < r.y + r.h; ++y) {
            const DepthMm* row = frame.depth.data() + static_cast<std::size_t>(y) * frame.width + r.x;
            for (std::uint32_t k = 0; k < r.w; ++k)
                n += static_cast<std::uint32_t>(static_cast<std::uint16_t>(row[k] - 1u) < limit);
        }
        counts[i] = n;
    }
    return counts;
}

std::uint64_t min_eligible_pixels(const RoiLayout& layout, const SegmentationConfig& cfg, std::size_t i) {
    const double need = std::ceil(cfg.min_area_frac * static_cast<double>(layout.rois[i].area()));
    return need < 1.0 ? 1 : static_cast<std::uint64_t>(need);
}

RoiState dominant_roi(const RoiCounts& counts, const RoiLayout& layout, const SegmentationConfig& cfg,
                      RoiState prev_dominant) {
    std::uint32_t best = 0;
    bool any = false;
    for (std::size_t i = 0; i < 3; ++i) {
        if (counts[i] < min_eligible_pixels(layout, cfg, i)) continue;
        if (!any || counts[i] > best) best = counts[i];
        any = true;
    }
    if (!any) return RoiState::Idle;

    const int prev = to_int(prev_dominant);
    if (prev != 0 && counts[prev - 1] == best && counts[prev - 1] >= min_eligible_pixels(layout, cfg, prev - 1))
        return prev_dominant;
    for (std::size_t i = 0; i < 3; ++i)
        if (counts[i] == best && counts[i] >= min_eligible_pixels(layout, cfg, i))
            return static_cast<RoiState>(i + 1);
    return RoiState::Idle;  // unreachable
}

RoiActivation process_frame(const DepthFrame& frame, const RoiLayout& layout, const SegmentationConfig& cfg,
                            const std::optional<RoiActivation>& prev) {
    if (prev && frame.frame_index <= prev->frame_index)
        throw std::invalid_argument("frame_index must increase: got " + std::to_string(frame.frame_index) +
                                    " after " + std::to_string(prev->frame_index));

    RoiActivation out;
    out.frame_index = frame.frame_index;
    out.fg_px = roi_foreground_counts(frame, layout, cfg);
    out.raw_dominant = dominant_roi(out.fg_px, layout, cfg, prev ? prev->dominant : RoiState::Idle);

    if (!prev) {
        out.dominant = out.raw_dominant;
        return out;
    }

    out.dominant = prev->dominant;
    if (out.raw_dominant == prev->dominant) return out;  // pending cleared

    out.pending = out.raw_dominant;
    out.pending_run = prev->pending == out.raw_dominant && prev->pending_run > 0 ? prev->pending_run + 1 : 1;
    if (out.pending_run >= cfg.debounce_frames) {
        out.dominant = out.raw_dominant;
        out.pending = RoiState::Idle;
        out.pending_run = 0;
    }
    return out;
}

}  // namespace doorcount
