#include "doorcount/scene_synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace doorcount {

std::string_view to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Entry: return "entry";
        case ScenarioKind::Exit: return "exit";
        case ScenarioKind::RegretEnter: return "regret_enter";
        case ScenarioKind::RegretExit: return "regret_exit";
        case ScenarioKind::Loiter: return "loiter";
        case ScenarioKind::EmptyScene: return "empty";
    }
    return "unknown";
}

std::optional<ScenarioKind> scenario_kind_from_string(std::string_view s) {
    for (ScenarioKind k : kAllScenarioKinds)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

ScenarioExpectation ScenarioExpectation::for_kind(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Entry: return {1, 0, 0, 0};
        case ScenarioKind::Exit: return {0, 1, 0, 0};
        case ScenarioKind::RegretEnter: return {0, 0, 1, 0};
        case ScenarioKind::RegretExit: return {0, 0, 0, 1};
        case ScenarioKind::Loiter:
        case ScenarioKind::EmptyScene: return {};
    }
    return {};
}

ScenarioExpectation& ScenarioExpectation::operator+=(const ScenarioExpectation& o) {
    entries += o.entries;
    exits += o.exits;
    regret_enter += o.regret_enter;
    regret_exit += o.regret_exit;
    return *this;
}

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double unit_interval(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

const std::vector<double>& gaussian_quantiles() {
    static const std::vector<double> table = [] {
        const boost::math::normal standard;
        std::vector<double> q(65536);
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] = boost::math::quantile(standard, (static_cast<double>(i) + 0.5) / 65536.0);
        return q;
    }();
    return table;
}

bool is_moving(ScenarioKind k) {
    return k == ScenarioKind::Entry || k == ScenarioKind::Exit || k == ScenarioKind::RegretEnter ||
           k == ScenarioKind::RegretExit;
}

struct AxisExtent {
    double lo, hi;
};

AxisExtent along(const Rect& r, CrossingAxis axis) {
    return axis == CrossingAxis::horizontal ? AxisExtent{double(r.x), double(r.x) + r.w}
                                            : AxisExtent{double(r.y), double(r.y) + r.h};
}

}  // namespace

ScenarioRenderer::ScenarioRenderer(const ScenarioSpec& spec, const RoiLayout& layout, FrameDims dims)
    : spec_(spec), layout_(layout), dims_(dims) {
    try {
        layout.validate(dims.width, dims.height);
    } catch (const ConfigError& e) {
        throw GenerationError(std::string("invalid layout: ") + e.what());
    }
    if (spec.frame_count == 0) throw GenerationError("frame_count must be >= 1");
    if (!(spec.dropout_prob >= 0.0 && spec.dropout_prob <= 1.0))
        throw GenerationError("dropout_prob must lie in [0, 1]");
    if (!(spec.noise_sigma_mm >= 0.0) || !std::isfinite(spec.noise_sigma_mm))
        throw GenerationError("noise_sigma_mm must be finite and >= 0");
    if (spec.camera_height_mm > 65535) throw GenerationError("camera_height_mm exceeds the 16-bit depth range");
    if (spec.camera_height_mm == 0) throw GenerationError("camera_height_mm must be > 0");

    const bool has_person = spec.kind != ScenarioKind::EmptyScene;
    if (has_person) {
        if (spec.person_height_mm >= spec.camera_height_mm)
            throw GenerationError("person_height_mm must be below camera_height_mm");
        if (spec.head_radius_px == 0) throw GenerationError("head_radius_px must be >= 1");
        if (2ull * spec.head_radius_px > std::min(dims.width, dims.height))
            throw GenerationError("head disc larger than the frame");
    }

    const double r = spec.head_radius_px;
    const double off = spec.start_offset_px;
    const AxisExtent roi1 = along(layout.rois[0], layout.crossing_axis);
    const AxisExtent roi2 = along(layout.rois[1], layout.crossing_axis);
    const AxisExtent roi3 = along(layout.rois[2], layout.crossing_axis);
    const double inside_end = roi1.lo - r - off;   // disc wholly past ROI 1
    const double outside_end = roi3.hi + r + off;  // disc wholly past ROI 3
    const double middle = (roi2.lo + roi2.hi) / 2;

    switch (spec.kind) {
        case ScenarioKind::Entry: start_ = outside_end; turn_ = inside_end; break;
        case ScenarioKind::Exit: start_ = inside_end; turn_ = outside_end; break;
        case ScenarioKind::RegretEnter: start_ = outside_end; turn_ = middle; returns_ = true; break;
        case ScenarioKind::RegretExit: start_ = inside_end; turn_ = middle; returns_ = true; break;
        case ScenarioKind::Loiter:
        case ScenarioKind::EmptyScene: start_ = turn_ = middle; break;
    }

    const Rect& mid = layout.rois[1];
    lateral_ = layout.crossing_axis == CrossingAxis::horizontal ? mid.y + mid.h / 2.0 : mid.x + mid.w / 2.0;

    if (is_moving(spec.kind)) {
        if (!(spec.speed_px_per_frame > 0.0) || !std::isfinite(spec.speed_px_per_frame))
            throw GenerationError("speed_px_per_frame must be finite and > 0");
        const double travel = returns_ ? 2 * std::abs(turn_ - start_) : std::abs(turn_ - start_);
        if (travel / spec.speed_px_per_frame > 1e8) throw GenerationError("speed_px_per_frame too small");
        needed_ = static_cast<std::uint32_t>(std::ceil(travel / spec.speed_px_per_frame)) + 1;
        if (spec.frame_count < needed_)
            throw GenerationError("frame_count " + std::to_string(spec.frame_count) + " too short: the " +
                                  std::string(to_string(spec.kind)) + " trajectory needs " + std::to_string(needed_) +
                                  " frames to leave the ROIs");
    }
}

std::optional<double> ScenarioRenderer::head_position(std::uint32_t t) const {
    if (spec_.kind == ScenarioKind::EmptyScene) return std::nullopt;
    if (!is_moving(spec_.kind)) return start_;
    const double length = std::abs(turn_ - start_);
    const double dir = turn_ >= start_ ? 1.0 : -1.0;
    const double travelled = spec_.speed_px_per_frame * t;
    double d;
    if (!returns_)
        d = std::min(travelled, length);
    else
        d = travelled <= length ? travelled : std::max(0.0, 2 * length - travelled);
    return start_ + dir * d;
}

DepthFrame ScenarioRenderer::frame(std::uint32_t t) const {
    DepthFrame f(dims_.width, dims_.height, t, t * kFramePeriodUs, static_cast<DepthMm>(spec_.camera_height_mm));

    if (const auto pos = head_position(t)) {
        const bool horiz = layout_.crossing_axis == CrossingAxis::horizontal;
        const double cx = horiz ? *pos : lateral_;
        const double cy = horiz ? lateral_ : *pos;
        const double r = spec_.head_radius_px;
        const auto head = static_cast<DepthMm>(head_depth_mm());
        const auto clamp_px = [](double v, std::uint32_t limit) {
            return static_cast<std::int64_t>(std::clamp(v, 0.0, static_cast<double>(limit)));
        };
        const std::int64_t x0 = clamp_px(std::floor(cx - r), dims_.width), x1 = clamp_px(std::ceil(cx + r), dims_.width);
        const std::int64_t y0 = clamp_px(std::floor(cy - r), dims_.height), y1 = clamp_px(std::ceil(cy + r), dims_.height);
        for (std::int64_t y = y0; y < y1; ++y) {
            const double dy = static_cast<double>(y) + 0.5 - cy;
            for (std::int64_t x = x0; x < x1; ++x) {
                const double dx = static_cast<double>(x) + 0.5 - cx;
                if (dx * dx + dy * dy <= r * r) f.at(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)) = head;
            }
        }
    }

    const bool noisy = spec_.noise_sigma_mm > 0.0;
    const bool drops = spec_.dropout_prob > 0.0;
    if (!noisy && !drops) return f;

    const bool drop_all = spec_.dropout_prob >= 1.0;
    const auto drop_below = static_cast<std::uint64_t>(std::floor(spec_.dropout_prob * 4294967296.0));
    const std::vector<double>& quantiles = gaussian_quantiles();
    std::mt19937_64 engine(mix64(spec_.rng_seed ^ mix64(t)));
    for (DepthMm& d : f.depth) {
        const std::uint64_t x = engine();
        if (drops && (drop_all || (x & 0xffffffffull) < drop_below)) {
            d = kNoDepth;
            continue;
        }
        if (noisy) {
            const double v = static_cast<double>(d) + spec_.noise_sigma_mm * quantiles[(x >> 32) & 0xffff];
            d = static_cast<DepthMm>(std::clamp<long>(std::lround(v), 1, 65535));
        }
    }
    return f;
}

std::uint32_t required_frame_count(const ScenarioSpec& spec, const RoiLayout& layout, FrameDims dims) {
    ScenarioSpec probe = spec;
    probe.frame_count = UINT32_MAX;
    return ScenarioRenderer(probe, layout, dims).trajectory_frames();
}

ScenarioSpec with_auto_frame_count(ScenarioSpec spec, const RoiLayout& layout, FrameDims dims) {
    if (spec.frame_count != 0) return spec;
    spec.frame_count = is_moving(spec.kind) ? required_frame_count(spec, layout, dims) + 2 : 30;
    return spec;
}

Scenario generate(const ScenarioSpec& spec, const RoiLayout& layout, FrameDims dims) {
    const ScenarioRenderer renderer(spec, layout, dims);
    Scenario out{spec, {}, renderer.expectation()};
    out.frames.reserve(renderer.frame_count());
    for (std::uint32_t t = 0; t < renderer.frame_count(); ++t) out.frames.push_back(renderer.frame(t));
    return out;
}

std::vector<ScenarioSpec> plan_suite(std::uint32_t n_per_kind, const ScenarioSpec& base, std::uint64_t seed,
                                     const RoiLayout& layout, FrameDims dims) {
    if (n_per_kind == 0) throw GenerationError("n_per_kind must be >= 1");
    std::mt19937_64 engine(seed);
    std::vector<ScenarioSpec> specs;
    specs.reserve(std::size_t{n_per_kind} * kAllScenarioKinds.size());
    for (std::uint32_t i = 0; i < n_per_kind; ++i) {
        for (ScenarioKind kind : kAllScenarioKinds) {
            ScenarioSpec s = base;
            s.kind = kind;
            s.speed_px_per_frame = base.speed_px_per_frame * (0.5 + unit_interval(engine()));
            s.start_offset_px = static_cast<std::uint32_t>(engine() % (2ull * base.start_offset_px + 1));
            s.rng_seed = engine();
            s.frame_count = 0;
            specs.push_back(with_auto_frame_count(s, layout, dims));
        }
    }
    return specs;
}

std::vector<Scenario> generate_suite(std::uint32_t n_per_kind, const ScenarioSpec& base, std::uint64_t seed,
                                     const RoiLayout& layout, FrameDims dims) {
    std::vector<Scenario> out;
    for (const ScenarioSpec& s : plan_suite(n_per_kind, base, seed, layout, dims))
        out.push_back(generate(s, layout, dims));
    return out;
}

}  // namespace doorcount
