#include "doorcount/logs.hpp"

#include <charconv>
#include <sstream>

#include "json.hpp"

namespace doorcount {

namespace {

// Complete (newline-terminated) lines of a file that may be appended to concurrently.
std::vector<std::string> complete_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    std::ifstream in(path, std::ios::binary);
    if (!in) return lines;
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::size_t start = 0;
    for (std::size_t nl = content.find('\n'); nl != std::string::npos; nl = content.find('\n', start)) {
        lines.emplace_back(content, start, nl - start);
        start = nl + 1;
    }
    return lines;
}

std::ofstream open_append(const std::filesystem::path& path, bool truncate = false) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | (truncate ? std::ios::out | std::ios::trunc : std::ios::app));
    if (!out) throw LogIoError("cannot open " + path.string());
    return out;
}

template <typename T>
bool parse_field(std::string_view s, T& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::optional<AnalysisRecord> parse_analysis_line(const std::string& line) {
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
        const auto comma = rest.find(',');
        f.push_back(rest.substr(0, comma));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    AnalysisRecord r;
    if (f.size() != 5 || !parse_field(f[0], r.frame_index) || !parse_field(f[1], r.roi1_px) ||
        !parse_field(f[2], r.roi2_px) || !parse_field(f[3], r.roi3_px) || !parse_field(f[4], r.dominant))
        return std::nullopt;
    return r;
}

}  // namespace

AnalysisRecord AnalysisRecord::from(const RoiActivation& a) {
    return {a.frame_index, a.fg_px[0], a.fg_px[1], a.fg_px[2], to_int(a.dominant)};
}

std::string format_analysis_line(const AnalysisRecord& r) {
    std::ostringstream s;
    s << r.frame_index << ',' << r.roi1_px << ',' << r.roi2_px << ',' << r.roi3_px << ',' << r.dominant;
    return s.str();
}

AnalysisLog::AnalysisLog(std::filesystem::path path) : path_(std::move(path)) {
    const auto lines = complete_lines(path_);
    for (auto it = lines.rbegin(); it != lines.rend(); ++it)
        if (auto r = parse_analysis_line(*it)) {
            last_ = r->frame_index;
            break;
        }
    const bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0;
    out_ = open_append(path_);
    if (fresh) out_ << kAnalysisHeader << '\n';
}

void AnalysisLog::append(const AnalysisRecord& r) {
    if (last_ && r.frame_index <= *last_)
        throw LogOrderError("analysis record for frame " + std::to_string(r.frame_index) + " after frame " +
                            std::to_string(*last_));
    out_ << format_analysis_line(r) << '\n';
    if (!out_) throw LogIoError("write failed on " + path_.string());
    last_ = r.frame_index;
}

void AnalysisLog::flush() { out_.flush(); }

void AnalysisLog::truncate() {
    out_.close();
    out_ = open_append(path_, true);
    out_ << kAnalysisHeader << '\n';
    out_.flush();
    last_.reset();
}

std::vector<AnalysisRecord> read_analysis_log(const std::filesystem::path& path) {
    std::vector<AnalysisRecord> out;
    for (const std::string& line : complete_lines(path))
        if (auto r = parse_analysis_line(line)) out.push_back(*r);
    return out;
}

std::string format_event_line(const CrossingEvent& e) {
    nlohmann::ordered_json counts;
    counts["entries"] = e.counts_after.entries;
    counts["exits"] = e.counts_after.exits;
    counts["regret_enter"] = e.counts_after.regret_enter;
    counts["regret_exit"] = e.counts_after.regret_exit;
    counts["occupancy"] = e.counts_after.occupancy;
    nlohmann::ordered_json j;
    j["seq"] = e.seq;
    j["kind"] = to_string(e.kind);
    j["frame_index"] = e.frame_index;
    j["timestamp_us"] = e.timestamp_us;
    j["counts_after"] = std::move(counts);
    j["snapshot_id"] = e.snapshot_id ? nlohmann::ordered_json(*e.snapshot_id) : nlohmann::ordered_json(nullptr);
    return j.dump();
}

CrossingEvent parse_event_line(const std::string& line) {
    try {
        const auto j = nlohmann::json::parse(line);
        CrossingEvent e;
        e.seq = j.at("seq").get<std::uint64_t>();
        const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) throw std::invalid_argument("unknown event kind");
        e.kind = *kind;
        e.frame_index = j.at("frame_index").get<std::uint64_t>();
        e.timestamp_us = j.at("timestamp_us").get<std::uint64_t>();
        const auto& c = j.at("counts_after");
        e.counts_after.entries = c.at("entries").get<std::uint64_t>();
        e.counts_after.exits = c.at("exits").get<std::uint64_t>();
        e.counts_after.regret_enter = c.at("regret_enter").get<std::uint64_t>();
        e.counts_after.regret_exit = c.at("regret_exit").get<std::uint64_t>();
        e.counts_after.occupancy = c.at("occupancy").get<std::int64_t>();
        if (const auto& s = j.at("snapshot_id"); !s.is_null()) e.snapshot_id = s.get<std::string>();
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw std::invalid_argument(std::string("malformed event record: ") + ex.what());
    }
}

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
    const auto lines = complete_lines(path_);
    if (!lines.empty()) last_ = parse_event_line(lines.back()).seq;
    out_ = open_append(path_);
}

void EventLog::append(const CrossingEvent& e) {
    if (last_ && e.seq <= *last_)
        throw LogOrderError("event seq " + std::to_string(e.seq) + " after seq " + std::to_string(*last_));
    out_ << format_event_line(e) << '\n';
    out_.flush();
    if (!out_) throw LogIoError("write failed on " + path_.string());
    last_ = e.seq;
}

void EventLog::truncate() {
    out_.close();
    out_ = open_append(path_, true);
    last_.reset();
}

std::vector<CrossingEvent> read_event_log(const std::filesystem::path& path) {
    std::vector<CrossingEvent> out;
    for (const std::string& line : complete_lines(path))
        if (!line.empty()) out.push_back(parse_event_line(line));
    return out;
}

}  // namespace doorcount
