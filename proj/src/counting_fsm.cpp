#include "doorcount/counting_fsm.hpp"

namespace doorcount {

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Entry: return "entry";
        case EventKind::Exit: return "exit";
        case EventKind::RegretEnter: return "regret_enter";
        case EventKind::RegretExit: return "regret_exit";
    }
    return "unknown";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    if (s == "entry") return EventKind::Entry;
    if (s == "exit") return EventKind::Exit;
    if (s == "regret_enter") return EventKind::RegretEnter;
    if (s == "regret_exit") return EventKind::RegretExit;
    return std::nullopt;
}

CounterState CounterState::initial(std::int64_t initial_occupancy, std::uint32_t idle_timeout_frames) {
    CounterState s;
    s.initial_occupancy = initial_occupancy;
    s.counts.occupancy = initial_occupancy;
    s.idle_timeout_frames = idle_timeout_frames;
    return s;
}

std::int64_t occupancy(const CounterState& state) {
    return state.initial_occupancy + static_cast<std::int64_t>(state.counts.entries) -
           static_cast<std::int64_t>(state.counts.exits);
}

namespace {

void count(CounterState& s, EventKind kind) {
    switch (kind) {
        case EventKind::Entry: ++s.counts.entries; break;
        case EventKind::Exit: ++s.counts.exits; break;
        case EventKind::RegretEnter: ++s.counts.regret_enter; break;
        case EventKind::RegretExit: ++s.counts.regret_exit; break;
    }
    s.counts.occupancy = occupancy(s);
    s.flag_1_2 = false;
    s.flag_3_2 = false;
}

// Leaving ROI 2 toward a terminal band. The flag of the opposite side marks
// a full traversal and is checked first.
std::optional<EventKind> leave_middle(const CounterState& s, RoiState to) {
    if (to == RoiState::Roi1) {
        if (s.flag_3_2) return EventKind::Entry;
        if (s.flag_1_2) return EventKind::RegretExit;
    } else if (to == RoiState::Roi3) {
        if (s.flag_1_2) return EventKind::Exit;
        if (s.flag_3_2) return EventKind::RegretEnter;
    }
    return std::nullopt;
}

}  // namespace

StepResult fsm_step(const CounterState& state, RoiState next, std::uint64_t frame_index, std::uint64_t timestamp_us) {
    StepResult r{state, std::nullopt};
    CounterState& s = r.state;

    if (next == RoiState::Idle) {
        s.cur_state = RoiState::Idle;
        if (s.idle_frames < UINT32_MAX) ++s.idle_frames;
        if (s.idle_frames >= s.idle_timeout_frames) {
            s.flag_1_2 = false;
            s.flag_3_2 = false;
        }
    } else if (next != s.cur_state) {
        const RoiState cur = s.cur_state;
        s.idle_frames = 0;
        s.cur_state = next;
        if (next == RoiState::Roi2) {
            if (cur == RoiState::Roi1) s.flag_1_2 = true;
            if (cur == RoiState::Roi3) s.flag_3_2 = true;
        } else if (cur == RoiState::Roi2) {
            if (auto kind = leave_middle(state, next)) {
                count(s, *kind);
                r.event = CrossingEvent{s.next_seq++, *kind, frame_index, timestamp_us, s.counts, std::nullopt};
            }
        }
    }

#ifdef DOORCOUNT_INVARIANT_CHECKS
    check_step_invariants(state, r);
#endif
    return r;
}

CounterState reset(const CounterState& state) {
    CounterState s = CounterState::initial(state.initial_occupancy, state.idle_timeout_frames);
    s.next_seq = state.next_seq;
    return s;
}

void check_step_invariants(const CounterState& before, const StepResult& after) {
    const Counts& a = before.counts;
    const Counts& b = after.state.counts;
    if (b.entries < a.entries || b.exits < a.exits || b.regret_enter < a.regret_enter ||
        b.regret_exit < a.regret_exit)
        throw InvariantViolation("event counter decreased");
    if (b.occupancy != occupancy(after.state))
        throw InvariantViolation("occupancy != initial + entries - exits");
    const std::uint64_t delta = b.total_events() - a.total_events();
    if (after.event) {
        if (delta != 1) throw InvariantViolation("event emitted but counters moved by " + std::to_string(delta));
        if (after.state.flag_1_2 || after.state.flag_3_2) throw InvariantViolation("flags set after an event");
        if (after.event->counts_after != b) throw InvariantViolation("event snapshot differs from state");
        if (after.event->seq != before.next_seq) throw InvariantViolation("event seq skipped");
    } else if (delta != 0) {
        throw InvariantViolation("counters moved without an event");
    }
}

}  // namespace doorcount
