#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "doorcount/counting_fsm.hpp"

namespace doorcount {

struct ReportBucket {
    std::uint64_t start_us = 0;
    std::uint64_t end_us = 0;  // exclusive
    std::uint64_t entries = 0;
    std::uint64_t exits = 0;
    std::uint64_t regret_enter = 0;
    std::uint64_t regret_exit = 0;
    /// Occupancy after the last event at or before the end of the bucket.
    std::int64_t occupancy = 0;

    friend bool operator==(const ReportBucket&, const ReportBucket&) = default;
};

struct Report {
    std::uint64_t from_us = 0;
    std::uint64_t to_us = 0;
    std::uint64_t bucket_us = 0;
    std::vector<ReportBucket> buckets;
    /// Sums over all buckets; occupancy is the value at the end of the window.
    ReportBucket totals;
};

inline constexpr std::uint64_t kMaxReportBuckets = 100'000;

/// Buckets events with timestamp in [from_us, to_us) into consecutive
/// windows of bucket_us (the last may be shorter). Throws
/// std::invalid_argument when from_us > to_us, bucket_us == 0, or the window
/// would need more than kMaxReportBuckets buckets.
Report build_report(std::span<const CrossingEvent> events, std::uint64_t from_us, std::uint64_t to_us,
                    std::uint64_t bucket_us);

std::string report_to_json(const Report& r);
/// "start_us,end_us,entries,exits,regret_enter,regret_exit,occupancy" rows
/// followed by a "total" row.
std::string report_to_csv(const Report& r);

}  // namespace doorcount
