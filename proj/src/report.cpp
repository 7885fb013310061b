#include "doorcount/report.hpp"

#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace doorcount {

namespace {

// Occupancy just before `e` was counted.
std::int64_t occupancy_before(const CrossingEvent& e) {
    switch (e.kind) {
        case EventKind::Entry: return e.counts_after.occupancy - 1;
        case EventKind::Exit: return e.counts_after.occupancy + 1;
        default: return e.counts_after.occupancy;
    }
}

void tally(ReportBucket& b, EventKind k) {
    switch (k) {
        case EventKind::Entry: ++b.entries; break;
        case EventKind::Exit: ++b.exits; break;
        case EventKind::RegretEnter: ++b.regret_enter; break;
        case EventKind::RegretExit: ++b.regret_exit; break;
    }
}

nlohmann::ordered_json bucket_json(const ReportBucket& b) {
    nlohmann::ordered_json j;
    j["start_us"] = b.start_us;
    j["end_us"] = b.end_us;
    j["entries"] = b.entries;
    j["exits"] = b.exits;
    j["regret_enter"] = b.regret_enter;
    j["regret_exit"] = b.regret_exit;
    j["occupancy"] = b.occupancy;
    return j;
}

}  // namespace

Report build_report(std::span<const CrossingEvent> events, std::uint64_t from_us, std::uint64_t to_us,
                    std::uint64_t bucket_us) {
    if (from_us > to_us) throw std::invalid_argument("report window has from > to");
    if (bucket_us == 0) throw std::invalid_argument("report bucket must be > 0");

    Report r{from_us, to_us, bucket_us, {}, {}};
    r.totals.start_us = from_us;
    r.totals.end_us = to_us;

    // Occupancy entering the window: last event before it, else the state
    // right before the first event inside it.
    std::int64_t running = 0;
    bool have_baseline = false;
    for (const CrossingEvent& e : events) {
        if (e.timestamp_us < from_us) {
            running = e.counts_after.occupancy;
            have_baseline = true;
        } else if (!have_baseline) {
            running = occupancy_before(e);
            have_baseline = true;
        }
    }

    const std::uint64_t n = (to_us - from_us) / bucket_us + ((to_us - from_us) % bucket_us != 0);
    if (n > kMaxReportBuckets)
        throw std::invalid_argument("report window needs " + std::to_string(n) + " buckets, limit is " +
                                    std::to_string(kMaxReportBuckets));
    r.buckets.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t start = from_us + i * bucket_us;
        r.buckets.push_back({start, std::min(to_us, start + bucket_us), 0, 0, 0, 0, running});
    }

    // Events are appended in seq order, so timestamps never go backwards.
    std::vector<bool> touched(n, false);
    for (const CrossingEvent& e : events) {
        if (e.timestamp_us < from_us || e.timestamp_us >= to_us) continue;
        const std::uint64_t i = (e.timestamp_us - from_us) / bucket_us;
        tally(r.buckets[i], e.kind);
        tally(r.totals, e.kind);
        r.buckets[i].occupancy = e.counts_after.occupancy;
        touched[i] = true;
    }
    for (std::uint64_t i = 0; i < n; ++i) {
        if (touched[i])
            running = r.buckets[i].occupancy;
        else
            r.buckets[i].occupancy = running;
    }
    r.totals.occupancy = running;
    return r;
}

std::string report_to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["from_us"] = r.from_us;
    j["to_us"] = r.to_us;
    j["bucket_us"] = r.bucket_us;
    auto buckets = nlohmann::ordered_json::array();
    for (const ReportBucket& b : r.buckets) buckets.push_back(bucket_json(b));
    j["buckets"] = std::move(buckets);
    j["totals"] = bucket_json(r.totals);
    return j.dump();
}

std::string report_to_csv(const Report& r) {
    std::ostringstream s;
    s << "start_us,end_us,entries,exits,regret_enter,regret_exit,occupancy\n";
    auto row = [&](const std::string& a, const std::string& b, const ReportBucket& x) {
        s << a << ',' << b << ',' << x.entries << ',' << x.exits << ',' << x.regret_enter << ',' << x.regret_exit
          << ',' << x.occupancy << '\n';
    };
    for (const ReportBucket& b : r.buckets) row(std::to_string(b.start_us), std::to_string(b.end_us), b);
    row("total", "", r.totals);
    return s.str();
}

}  // namespace doorcount
