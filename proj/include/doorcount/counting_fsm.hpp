#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "doorcount/depth_pipeline.hpp"

namespace doorcount {

enum class EventKind : std::uint8_t { Entry, Exit, RegretEnter, RegretExit };

/// Wire names used in logs and the HTTP API: entry, exit, regret_enter, regret_exit.
std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

struct Counts {
    std::uint64_t entries = 0;
    std::uint64_t exits = 0;
    std::uint64_t regret_enter = 0;
    std::uint64_t regret_exit = 0;
    std::int64_t occupancy = 0;

    std::uint64_t total_events() const { return entries + exits + regret_enter + regret_exit; }
    friend bool operator==(const Counts&, const Counts&) = default;
};

inline constexpr std::uint32_t kDefaultIdleTimeoutFrames = 30;

/// Registers of the crossing state machine.
struct CounterState {
    RoiState cur_state = RoiState::Idle;
    bool flag_1_2 = false;  // moved from ROI 1 into ROI 2
    bool flag_3_2 = false;  // moved from ROI 3 into ROI 2
    Counts counts;
    std::int64_t initial_occupancy = 0;
    std::uint32_t idle_frames = 0;
    std::uint32_t idle_timeout_frames = kDefaultIdleTimeoutFrames;
    /// Sequence number the next event will carry. Survives reset.
    std::uint64_t next_seq = 1;

    static CounterState initial(std::int64_t initial_occupancy = 0,
                                std::uint32_t idle_timeout_frames = kDefaultIdleTimeoutFrames);

    friend bool operator==(const CounterState&, const CounterState&) = default;
};

struct CrossingEvent {
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Entry;
    std::uint64_t frame_index = 0;
    std::uint64_t timestamp_us = 0;
    Counts counts_after;
    std::optional<std::string> snapshot_id;

    friend bool operator==(const CrossingEvent&, const CrossingEvent&) = default;
};

struct StepResult {
    CounterState state;
    std::optional<CrossingEvent> event;  // at most one per step
};

/// Pure transition on the published dominant state of the next frame.
StepResult fsm_step(const CounterState& state, RoiState next_dominant, std::uint64_t frame_index,
                    std::uint64_t timestamp_us);

/// initial + entries - exits. Negative values are reported as-is.
std::int64_t occupancy(const CounterState& state);
inline bool occupancy_consistent(const CounterState& state) { return occupancy(state) >= 0; }

/// Zeroes counters, flags and the idle counter and returns to Idle.
/// Occupancy goes back to the configured initial value; event numbering
/// continues where it left off.
CounterState reset(const CounterState& state);

/// Thrown by the invariant checks compiled in with DOORCOUNT_INVARIANT_CHECKS.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Checks the per-step contract between two consecutive states: counters
/// never decrease, occupancy identity holds, flags are clear after an event,
/// and exactly one counter moved when an event was emitted.
void check_step_invariants(const CounterState& before, const StepResult& after);

}  // namespace doorcount
