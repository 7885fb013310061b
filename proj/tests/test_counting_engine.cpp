#include <gtest/gtest.h>

#include <fstream>

#include "doorcount/counting_engine.hpp"
#include "doorcount/scene_synth.hpp"
#include "doorcount/snapshot.hpp"
#include "test_support.hpp"

using namespace doorcount;
using doorcount::testing::TempDir;

namespace {

constexpr FrameDims kDims{160, 120};

EngineConfig small_config() { return EngineConfig{RoiLayout::bands(kDims.width, kDims.height), {}, 30, 0}; }

Scenario small_scenario(ScenarioKind kind) {
    ScenarioSpec s;
    s.kind = kind;
    s.head_radius_px = 10;
    s.speed_px_per_frame = 5;
    const RoiLayout l = RoiLayout::bands(kDims.width, kDims.height);
    return generate(with_auto_frame_count(s, l, kDims), l, kDims);
}

}  // namespace

TEST(Engine, EntryProducesEventSnapshotAndLogs) {
    TempDir dir("engine");
    const Scenario sc = small_scenario(ScenarioKind::Entry);
    CountingEngine eng(small_config(), kDims, LogPaths::under(dir.path()));
    std::vector<CrossingEvent> events;
    for (const auto& f : sc.frames)
        if (auto e = eng.process(f)) events.push_back(*e);
    eng.flush();
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].kind, EventKind::Entry);
    EXPECT_EQ(events[0].seq, 1u);
    EXPECT_EQ(events[0].snapshot_id, "snap-00000001");
    EXPECT_TRUE(std::filesystem::is_regular_file(dir / "snapshots/snap-00000001.pgm"));
    EXPECT_EQ(read_event_log(dir / "events.jsonl"), events);
    EXPECT_EQ(read_analysis_log(dir / "analysis.csv").size(), sc.frames.size());
    EXPECT_EQ(eng.frames_processed(), sc.frames.size());
    EXPECT_EQ(eng.last_event_seq(), 1u);
    EXPECT_EQ(eng.last_timestamp_us(), sc.frames.back().timestamp_us);
    EXPECT_FALSE(eng.degraded());
}

TEST(Engine, WorksWithoutLogs) {
    const Scenario sc = small_scenario(ScenarioKind::Exit);
    CountingEngine eng(small_config(), kDims);
    for (const auto& f : sc.frames) eng.process(f);
    EXPECT_EQ(eng.state().counts, (Counts{0, 1, 0, 0, -1}));
    EXPECT_EQ(eng.snapshots(), nullptr);
}

TEST(Engine, RejectsBadFrames) {
    CountingEngine eng(small_config(), kDims);
    EXPECT_THROW(eng.process(DepthFrame(10, 10, 0)), std::invalid_argument);
    DepthFrame ragged(kDims.width, kDims.height, 0);
    ragged.depth.pop_back();
    EXPECT_THROW(eng.process(ragged), std::invalid_argument);
    eng.process(DepthFrame(kDims.width, kDims.height, 3, 0, 2200));
    EXPECT_THROW(eng.process(DepthFrame(kDims.width, kDims.height, 3, 0, 2200)), std::invalid_argument);
    EXPECT_EQ(eng.frames_processed(), 1u);
}

TEST(Engine, RejectsBadConfigAtConstruction) {
    EngineConfig c = small_config();
    c.segmentation.threshold_mm = 0;
    EXPECT_THROW(CountingEngine(c, kDims), ConfigError);
    EXPECT_THROW(CountingEngine(small_config(), FrameDims{100, 100}), ConfigError);
}

TEST(Engine, FreshEngineTruncatesOldLogs) {
    TempDir dir("engine");
    {
        CountingEngine eng(small_config(), kDims, LogPaths::under(dir.path()));
        for (const auto& f : small_scenario(ScenarioKind::Entry).frames) eng.process(f);
    }
    ASSERT_EQ(read_event_log(dir / "events.jsonl").size(), 1u);
    CountingEngine again(small_config(), kDims, LogPaths::under(dir.path()));
    EXPECT_TRUE(read_event_log(dir / "events.jsonl").empty());
    EXPECT_TRUE(read_analysis_log(dir / "analysis.csv").empty());
    EXPECT_FALSE(std::filesystem::exists(dir / "snapshots/snap-00000001.pgm"));
}

TEST(Engine, ResetKeepsLogsClearKeepsCounters) {
    TempDir dir("engine");
    CountingEngine eng(small_config(), kDims, LogPaths::under(dir.path()));
    for (const auto& f : small_scenario(ScenarioKind::Entry).frames) eng.process(f);
    eng.reset_counters();
    EXPECT_EQ(eng.state().counts, Counts{});
    EXPECT_EQ(read_event_log(dir / "events.jsonl").size(), 1u);

    // Numbering continues after reset.
    std::uint64_t idx = eng.frames_processed() + 10;
    std::optional<CrossingEvent> ev;
    for (auto f : small_scenario(ScenarioKind::Exit).frames) {
        f.frame_index = idx++;
        if (auto e = eng.process(f)) ev = e;
    }
    ASSERT_TRUE(ev);
    EXPECT_EQ(ev->seq, 2u);

    eng.clear_logs();
    EXPECT_EQ(eng.state().counts.exits, 1u);
    EXPECT_TRUE(read_event_log(dir / "events.jsonl").empty());
    EXPECT_FALSE(std::filesystem::exists(dir / "snapshots/snap-00000002.pgm"));
}

TEST(Engine, SnapshotFailureDegradesButKeepsCounting) {
    TempDir dir("engine");
    // A plain file where the snapshot directory should be.
    { std::ofstream(dir / "snapshots") << "x"; }
    CountingEngine eng(small_config(), kDims, LogPaths::under(dir.path()));
    std::vector<CrossingEvent> events;
    for (const auto& f : small_scenario(ScenarioKind::Entry).frames)
        if (auto e = eng.process(f)) events.push_back(*e);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_FALSE(events[0].snapshot_id);
    EXPECT_TRUE(eng.degraded());
    EXPECT_FALSE(eng.last_sink_error().empty());
    EXPECT_EQ(eng.state().counts.entries, 1u);
    EXPECT_EQ(read_event_log(dir / "events.jsonl").size(), 1u);
}

TEST(Engine, UnwritableLogDirFailsAtStartup) {
    TempDir dir("engine");
    { std::ofstream(dir / "blocker") << "x"; }
    EXPECT_THROW(CountingEngine(small_config(), kDims, LogPaths::under(dir / "blocker")), std::exception);
}

TEST(Engine, InitialOccupancyAndIdleTimeoutFlowThrough) {
    EngineConfig c = small_config();
    c.initial_occupancy = 5;
    c.idle_timeout_frames = 7;
    CountingEngine eng(c, kDims);
    EXPECT_EQ(eng.state().counts.occupancy, 5);
    EXPECT_EQ(eng.state().idle_timeout_frames, 7u);
    for (const auto& f : small_scenario(ScenarioKind::Exit).frames) eng.process(f);
    EXPECT_EQ(eng.state().counts.occupancy, 4);
}
