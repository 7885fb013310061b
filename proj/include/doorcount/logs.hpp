#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doorcount/counting_fsm.hpp"
#include "doorcount/depth_pipeline.hpp"

namespace doorcount {

/// Raised when a record would break the append order of a log.
class LogOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class LogIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Analysis log: one CSV line per processed frame.
//
//   frame,roi1,roi2,roi3,state
//   17,0,412,3,2

inline constexpr const char* kAnalysisHeader = "frame,roi1,roi2,roi3,state";

struct AnalysisRecord {
    std::uint64_t frame_index = 0;
    std::uint32_t roi1_px = 0;
    std::uint32_t roi2_px = 0;
    std::uint32_t roi3_px = 0;
    int dominant = 0;

    static AnalysisRecord from(const RoiActivation& a);
    friend bool operator==(const AnalysisRecord&, const AnalysisRecord&) = default;
};

std::string format_analysis_line(const AnalysisRecord& r);

class AnalysisLog {
public:
    /// Opens for append. A new or empty file gets the header line; an
    /// existing one resumes after its last record.
    explicit AnalysisLog(std::filesystem::path path);

    void append(const AnalysisRecord& r);
    void flush();
    /// Drops every record and rewrites the header.
    void truncate();
    const std::filesystem::path& path() const { return path_; }
    std::optional<std::uint64_t> last_frame_index() const { return last_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::optional<std::uint64_t> last_;
};

/// Parses complete lines only; a trailing partial line is ignored.
std::vector<AnalysisRecord> read_analysis_log(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Event log: one JSON object per line, fields in this order:
//
//   {"seq":1,"kind":"entry","frame_index":120,"timestamp_us":3999960,
//    "counts_after":{"entries":1,"exits":0,"regret_enter":0,"regret_exit":0,"occupancy":1},
//    "snapshot_id":"snap-00000001"}
//
// snapshot_id is null when no snapshot was stored. Flushed per event.

std::string format_event_line(const CrossingEvent& e);
/// Throws std::invalid_argument on malformed input.
CrossingEvent parse_event_line(const std::string& line);

class EventLog {
public:
    explicit EventLog(std::filesystem::path path);

    void append(const CrossingEvent& e);
    void truncate();
    const std::filesystem::path& path() const { return path_; }
    std::optional<std::uint64_t> last_seq() const { return last_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::optional<std::uint64_t> last_;
};

std::vector<CrossingEvent> read_event_log(const std::filesystem::path& path);

}  // namespace doorcount
