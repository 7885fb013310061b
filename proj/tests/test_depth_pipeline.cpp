#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "doorcount/depth_pipeline.hpp"
#include "test_support.hpp"

using namespace doorcount;
using doorcount::testing::frame_for_state;
using doorcount::testing::frame_with_blob;
using doorcount::testing::random_frame;

namespace {

constexpr std::uint32_t W = 60;
constexpr std::uint32_t H = 30;

RoiLayout small_bands() { return RoiLayout::bands(W, H); }

SegmentationConfig loose() {
    SegmentationConfig c;
    c.min_area_frac = 0.0;
    return c;
}

}  // namespace

TEST(Segmentation, ThresholdIsInclusiveAndZeroIsBackground) {
    EXPECT_TRUE(is_foreground(500, 1000));
    EXPECT_FALSE(is_foreground(0, 1000));
    EXPECT_TRUE(is_foreground(1000, 1000));
    EXPECT_FALSE(is_foreground(1001, 1000));
    EXPECT_TRUE(is_foreground(65535, 65535));
    EXPECT_TRUE(is_foreground(65535, 70000));
}

TEST(Segmentation, MaskMatchesPerPixelRule) {
    std::mt19937_64 rng(11);
    const DepthFrame f = random_frame(rng, W, H);
    SegmentationConfig cfg;
    const BinaryMask m = segment_foreground(f, cfg);
    ASSERT_EQ(m.bits.size(), f.depth.size());
    for (std::size_t i = 0; i < f.depth.size(); ++i)
        EXPECT_EQ(m.bits[i] != 0, f.depth[i] > 0 && f.depth[i] <= 1000) << i;
}

TEST(Grayscale, Endpoints) {
    EXPECT_EQ(gray_level(0, 1000), 0);
    EXPECT_EQ(gray_level(1000, 1000), 0);
    EXPECT_EQ(gray_level(500, 1000), 128);
    EXPECT_EQ(gray_level(1, 1000), 255);
    EXPECT_EQ(gray_level(1500, 1000), 0);
}

TEST(Grayscale, MatchesRoundedFormulaForEveryDepth) {
    for (std::uint32_t t : {1u, 7u, 1000u, 1234u, 65535u}) {
        for (std::uint32_t d = 0; d <= std::min<std::uint32_t>(t + 5, 65535); ++d) {
            long expected = 0;
            if (d > 0 && d <= t) expected = static_cast<long>(std::floor(255.0 * (t - d) / t + 0.5));
            ASSERT_EQ(gray_level(static_cast<DepthMm>(d), t), expected) << "d=" << d << " t=" << t;
        }
    }
}

TEST(Grayscale, ImageFollowsFrame) {
    DepthFrame f(4, 2, 0, 0, 0);
    f.at(1, 0) = 500;
    f.at(3, 1) = 2000;
    const GrayImage g = render_grayscale(f, SegmentationConfig{});
    ASSERT_EQ(g.pixels.size(), 8u);
    EXPECT_EQ(g.pixels[1], 128);
    EXPECT_EQ(g.pixels[7], 0);
    EXPECT_EQ(g.pixels[0], 0);
}

TEST(RoiCounts, AllBackgroundIsZero) {
    const DepthFrame f(W, H, 0, 0, 2200);
    const BinaryMask m = segment_foreground(f, SegmentationConfig{});
    EXPECT_EQ(roi_counts(m, small_bands()), (RoiCounts{0, 0, 0}));
}

TEST(RoiCounts, FullForegroundGivesAreas) {
    const DepthFrame f(W, H, 0, 0, 300);
    const RoiLayout l = small_bands();
    const BinaryMask m = segment_foreground(f, SegmentationConfig{});
    EXPECT_EQ(roi_counts(m, l), (RoiCounts{20 * 30, 20 * 30, 20 * 30}));
}

TEST(RoiCounts, SquareInsideMiddleBand) {
    const DepthFrame f = frame_with_blob(W, H, Rect{20, 5, 20, 20}, 500);
    const RoiLayout l = small_bands();
    EXPECT_EQ(roi_counts(segment_foreground(f, SegmentationConfig{}), l), (RoiCounts{0, 400, 0}));
    EXPECT_EQ(roi_foreground_counts(f, l, SegmentationConfig{}), (RoiCounts{0, 400, 0}));
}

TEST(RoiCounts, FusedPathAgreesWithMaskPath) {
    std::mt19937_64 rng(5);
    RoiLayout l;
    l.rois = {Rect{2, 3, 10, 20}, Rect{20, 0, 15, 30}, Rect{40, 10, 19, 5}};
    for (int i = 0; i < 50; ++i) {
        const DepthFrame f = random_frame(rng, W, H);
        SegmentationConfig cfg;
        cfg.threshold_mm = 1 + static_cast<std::uint32_t>(rng() % 70000);
        EXPECT_EQ(roi_foreground_counts(f, l, cfg), roi_counts(segment_foreground(f, cfg), l));
    }
}

TEST(Layout, DefaultBandsSplitTheFrame) {
    const RoiLayout h = RoiLayout::bands(640, 480);
    EXPECT_EQ(h.rois[0], (Rect{0, 0, 213, 480}));
    EXPECT_EQ(h.rois[1], (Rect{213, 0, 213, 480}));
    EXPECT_EQ(h.rois[2], (Rect{426, 0, 214, 480}));
    EXPECT_NO_THROW(h.validate(640, 480));

    const RoiLayout v = RoiLayout::bands(640, 480, CrossingAxis::vertical);
    EXPECT_EQ(v.rois[0], (Rect{0, 0, 640, 160}));
    EXPECT_EQ(v.rois[2], (Rect{0, 320, 640, 160}));
    EXPECT_NO_THROW(v.validate(640, 480));
}

TEST(Layout, RejectsBadGeometry) {
    RoiLayout l = small_bands();
    EXPECT_THROW(l.validate(W - 1, H), ConfigError);  // last band leaves the frame

    RoiLayout overlap = small_bands();
    overlap.rois[1].x = 15;
    EXPECT_THROW(overlap.validate(W, H), ConfigError);

    RoiLayout empty = small_bands();
    empty.rois[0].w = 0;
    EXPECT_THROW(empty.validate(W, H), ConfigError);

    RoiLayout unordered = small_bands();
    std::swap(unordered.rois[0], unordered.rois[2]);
    EXPECT_THROW(unordered.validate(W, H), ConfigError);

    // Ordering is judged along the configured axis only.
    RoiLayout vert = small_bands();
    vert.crossing_axis = CrossingAxis::vertical;
    EXPECT_THROW(vert.validate(W, H), ConfigError);
}

TEST(SegmentationConfigTest, Validation) {
    SegmentationConfig c;
    EXPECT_NO_THROW(c.validate());
    c.threshold_mm = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.min_area_frac = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c.min_area_frac = -0.1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = {};
    c.debounce_frames = 0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Dominant, Examples) {
    const RoiLayout l = RoiLayout::bands(640, 480);
    SegmentationConfig cfg;
    cfg.min_area_frac = 0.001;
    EXPECT_EQ(dominant_roi({0, 0, 0}, l, cfg, RoiState::Idle), RoiState::Idle);
    EXPECT_EQ(dominant_roi({500, 100, 0}, l, cfg, RoiState::Idle), RoiState::Roi1);
    EXPECT_EQ(dominant_roi({300, 300, 0}, l, cfg, RoiState::Roi1), RoiState::Roi1);
    EXPECT_EQ(dominant_roi({300, 300, 0}, l, cfg, RoiState::Roi3), RoiState::Roi1);
    EXPECT_EQ(dominant_roi({300, 300, 0}, l, cfg, RoiState::Roi2), RoiState::Roi2);
    EXPECT_EQ(dominant_roi({0, 300, 300}, l, cfg, RoiState::Idle), RoiState::Roi2);
    EXPECT_EQ(dominant_roi({0, 300, 300}, l, cfg, RoiState::Roi3), RoiState::Roi3);
}

TEST(Dominant, MinAreaGatesEligibility) {
    const RoiLayout l = RoiLayout::bands(640, 480);  // areas 102240, 102240, 102720
    SegmentationConfig cfg;                          // 1%: 1023, 1023, 1028
    EXPECT_EQ(min_eligible_pixels(l, cfg, 0), 1023u);
    EXPECT_EQ(min_eligible_pixels(l, cfg, 2), 1028u);
    EXPECT_EQ(dominant_roi({1022, 0, 0}, l, cfg, RoiState::Idle), RoiState::Idle);
    EXPECT_EQ(dominant_roi({1023, 0, 0}, l, cfg, RoiState::Idle), RoiState::Roi1);
    // The bigger count is ineligible, so the smaller eligible one wins.
    EXPECT_EQ(dominant_roi({0, 1100, 1027}, l, cfg, RoiState::Roi3), RoiState::Roi2);

    cfg.min_area_frac = 0.0;
    EXPECT_EQ(min_eligible_pixels(l, cfg, 1), 1u);
    EXPECT_EQ(dominant_roi({0, 0, 0}, l, cfg, RoiState::Roi2), RoiState::Idle);
    EXPECT_EQ(dominant_roi({0, 0, 1}, l, cfg, RoiState::Idle), RoiState::Roi3);
}

TEST(Dominant, TieKeepsPreviousOnlyWhenEligible) {
    const RoiLayout l = RoiLayout::bands(640, 480);
    SegmentationConfig cfg;
    cfg.min_area_frac = 0.0;
    EXPECT_EQ(dominant_roi({7, 7, 7}, l, cfg, RoiState::Roi3), RoiState::Roi3);
    EXPECT_EQ(dominant_roi({7, 7, 7}, l, cfg, RoiState::Idle), RoiState::Roi1);
    EXPECT_EQ(dominant_roi({7, 3, 7}, l, cfg, RoiState::Roi2), RoiState::Roi1);
}

TEST(ProcessFrame, DebounceOnePassesThrough) {
    const RoiLayout l = small_bands();
    const SegmentationConfig cfg = loose();
    std::optional<RoiActivation> prev;
    std::vector<int> published;
    std::uint64_t idx = 0;
    for (int s : {1, 2}) {
        prev = process_frame(frame_for_state(l, W, H, s, idx++), l, cfg, prev);
        published.push_back(to_int(prev->dominant));
    }
    EXPECT_EQ(published, (std::vector<int>{1, 2}));
}

TEST(ProcessFrame, DebounceSuppressesLoneFrame) {
    const RoiLayout l = small_bands();
    SegmentationConfig cfg = loose();
    cfg.debounce_frames = 2;
    std::optional<RoiActivation> prev;
    std::vector<int> published;
    std::uint64_t idx = 0;
    for (int s : {1, 2, 1, 1}) {
        prev = process_frame(frame_for_state(l, W, H, s, idx++), l, cfg, prev);
        published.push_back(to_int(prev->dominant));
    }
    EXPECT_EQ(published, (std::vector<int>{1, 1, 1, 1}));
}

TEST(ProcessFrame, DebounceSwitchesAfterRun) {
    const RoiLayout l = small_bands();
    SegmentationConfig cfg = loose();
    cfg.debounce_frames = 3;
    std::optional<RoiActivation> prev;
    std::vector<int> published;
    std::uint64_t idx = 0;
    for (int s : {3, 2, 2, 2, 1, 2, 1, 1, 1}) {
        prev = process_frame(frame_for_state(l, W, H, s, idx++), l, cfg, prev);
        published.push_back(to_int(prev->dominant));
    }
    EXPECT_EQ(published, (std::vector<int>{3, 3, 3, 2, 2, 2, 2, 2, 1}));
}

TEST(ProcessFrame, EmptyStreamPublishesIdle) {
    const RoiLayout l = small_bands();
    std::optional<RoiActivation> prev;
    for (std::uint64_t i = 0; i < 20; ++i) {
        prev = process_frame(DepthFrame(W, H, i, 0, 2200), l, SegmentationConfig{}, prev);
        EXPECT_EQ(prev->dominant, RoiState::Idle);
        EXPECT_EQ(prev->fg_px, (RoiCounts{0, 0, 0}));
    }
}

TEST(ProcessFrame, RejectsNonIncreasingIndex) {
    const RoiLayout l = small_bands();
    const auto a = process_frame(DepthFrame(W, H, 5, 0, 2200), l, SegmentationConfig{}, std::nullopt);
    EXPECT_THROW(process_frame(DepthFrame(W, H, 5, 0, 2200), l, SegmentationConfig{}, a), std::invalid_argument);
    EXPECT_THROW(process_frame(DepthFrame(W, H, 4, 0, 2200), l, SegmentationConfig{}, a), std::invalid_argument);
}

// --- properties -----------------------------------------------------------

TEST(PipelineProperty, ForegroundMonotoneInThreshold) {
    std::mt19937_64 rng(101);
    for (int iter = 0; iter < 200; ++iter) {
        const DepthFrame f = random_frame(rng, 16, 12);
        SegmentationConfig a, b;
        a.threshold_mm = 1 + static_cast<std::uint32_t>(rng() % 66000);
        b.threshold_mm = a.threshold_mm + static_cast<std::uint32_t>(rng() % 3000);
        const BinaryMask ma = segment_foreground(f, a);
        const BinaryMask mb = segment_foreground(f, b);
        for (std::size_t i = 0; i < ma.bits.size(); ++i) ASSERT_LE(ma.bits[i], mb.bits[i]);
    }
}

TEST(PipelineProperty, CountsAdditiveOverDisjointMasks) {
    std::mt19937_64 rng(202);
    RoiLayout l;
    l.rois = {Rect{0, 0, 18, 30}, Rect{22, 4, 14, 20}, Rect{40, 0, 20, 30}};
    for (int iter = 0; iter < 200; ++iter) {
        BinaryMask m1{W, H, std::vector<std::uint8_t>(W * H, 0)};
        BinaryMask m2 = m1;
        BinaryMask both = m1;
        for (std::size_t i = 0; i < m1.bits.size(); ++i) {
            const auto r = rng() % 3;  // 0: neither, 1: m1, 2: m2
            m1.bits[i] = r == 1;
            m2.bits[i] = r == 2;
            both.bits[i] = r != 0;
        }
        const RoiCounts c1 = roi_counts(m1, l), c2 = roi_counts(m2, l), c = roi_counts(both, l);
        for (int k = 0; k < 3; ++k) ASSERT_EQ(c[k], c1[k] + c2[k]);
    }
}

TEST(PipelineProperty, DominantInvariantUnderUniformScaling) {
    std::mt19937_64 rng(303);
    // Fractions are powers of two so the area products are exact.
    const double fracs[] = {0.0, 1.0 / 64, 1.0 / 16, 1.0 / 4};
    for (int iter = 0; iter < 2000; ++iter) {
        RoiLayout base;
        base.rois = {Rect{0, 0, 1 + std::uint32_t(rng() % 30), 40}, Rect{40, 0, 1 + std::uint32_t(rng() % 30), 40},
                     Rect{80, 0, 1 + std::uint32_t(rng() % 30), 40}};
        const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % 9);
        RoiLayout scaled = base;
        for (auto& r : scaled.rois) r.h *= k;

        SegmentationConfig cfg;
        cfg.min_area_frac = fracs[rng() % 4];
        RoiCounts c;
        for (int i = 0; i < 3; ++i) c[i] = static_cast<std::uint32_t>(rng() % (base.rois[i].area() + 1));
        if (rng() % 3 == 0) c[1] = c[0];  // exercise ties
        const RoiCounts kc{c[0] * k, c[1] * k, c[2] * k};
        const auto prev = static_cast<RoiState>(rng() % 4);
        ASSERT_EQ(dominant_roi(c, base, cfg, prev), dominant_roi(kc, scaled, cfg, prev));
    }
}

TEST(PipelineProperty, Deterministic) {
    std::mt19937_64 rng(404);
    std::vector<DepthFrame> stream;
    for (std::uint64_t i = 0; i < 40; ++i) stream.push_back(random_frame(rng, W, H, i));
    SegmentationConfig cfg;
    cfg.debounce_frames = 2;
    const RoiLayout l = small_bands();
    auto run = [&] {
        std::vector<RoiActivation> out;
        std::optional<RoiActivation> prev;
        for (const auto& f : stream) out.push_back(*(prev = process_frame(f, l, cfg, prev)));
        return out;
    };
    EXPECT_EQ(run(), run());
}

TEST(PipelineProperty, PixelsOutsideRoisNeverMatter) {
    std::mt19937_64 rng(505);
    RoiLayout l;
    l.rois = {Rect{5, 8, 12, 14}, Rect{24, 8, 12, 14}, Rect{43, 8, 12, 14}};
    SegmentationConfig cfg;
    cfg.debounce_frames = 2;
    for (int trial = 0; trial < 20; ++trial) {
        std::optional<RoiActivation> a, b;
        for (std::uint64_t i = 0; i < 30; ++i) {
            DepthFrame f = random_frame(rng, W, H, i);
            DepthFrame g = f;
            for (std::uint32_t y = 0; y < H; ++y)
                for (std::uint32_t x = 0; x < W; ++x) {
                    const bool inside =
                        l.rois[0].contains(x, y) || l.rois[1].contains(x, y) || l.rois[2].contains(x, y);
                    if (!inside) g.at(x, y) = static_cast<DepthMm>(rng() % 65536);
                }
            a = process_frame(f, l, cfg, a);
            b = process_frame(g, l, cfg, b);
            ASSERT_EQ(*a, *b);
        }
    }
}
