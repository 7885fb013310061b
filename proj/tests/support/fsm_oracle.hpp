#pragma once

// Brute-force reference for the crossing counter, written straight from the
// rule list and kept apart from the production transition function. Used as
// ground truth in equivalence tests only.

#include <cstdint>
#include <string>
#include <vector>

namespace doorcount::oracle {

struct OracleEvent {
    std::uint64_t seq;
    std::string kind;  // entry | exit | regret_enter | regret_exit
    std::size_t position;  // index into the input sequence
    std::uint64_t entries, exits, regret_enter, regret_exit;
    std::int64_t occupancy;

    bool operator==(const OracleEvent&) const = default;
};

struct OracleResult {
    std::uint64_t entries = 0, exits = 0, regret_enter = 0, regret_exit = 0;
    std::int64_t occupancy = 0;
    std::vector<OracleEvent> events;
};

OracleResult oracle_replay(const std::vector<int>& dominant_sequence, int idle_timeout_frames = 30,
                           std::int64_t initial_occupancy = 0);

}  // namespace doorcount::oracle
