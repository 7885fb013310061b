#include "doorcount/http_api.hpp"

#include <charconv>

#include "httplib.h"
#include "json.hpp"
#include "doorcount/logs.hpp"

namespace doorcount {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kPrefix = "/api/v1/";

ApiResponse json_response(int status, std::string body) { return {status, "application/json", std::move(body)}; }

ApiResponse error(int status, std::string_view code, const std::string& reason) {
    ordered_json j;
    j["error"] = code;
    j["reason"] = reason;
    return json_response(status, j.dump());
}

std::optional<std::uint64_t> parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

// Missing -> fallback; present but malformed -> empty.
std::optional<std::uint64_t> param_u64(const ApiRequest& req, const std::string& key, std::uint64_t fallback) {
    const auto it = req.params.find(key);
    if (it == req.params.end()) return fallback;
    return parse_u64(it->second);
}

ApiResponse events_page(CounterService& service, const ApiRequest& req) {
    const auto since = param_u64(req, "since_seq", 0);
    const auto limit = param_u64(req, "limit", kDefaultEventPage);
    if (!since || !limit || *limit == 0) return error(400, "invalid_parameter", "since_seq and limit must be unsigned integers, limit > 0");
    const std::size_t page = static_cast<std::size_t>(std::min<std::uint64_t>(*limit, kMaxEventPage));
    // One extra to tell whether more follow.
    auto events = service.events_since(*since, page + 1);
    const bool more = events.size() > page;
    if (more) events.pop_back();
    ordered_json list = ordered_json::array();
    for (const CrossingEvent& e : events) list.push_back(ordered_json::parse(format_event_line(e)));
    ordered_json j;
    j["events"] = std::move(list);
    j["next_since_seq"] = events.empty() ? *since : events.back().seq;
    j["more"] = more;
    return json_response(200, j.dump());
}

ApiResponse control(CounterService& service, const ApiRequest& req) {
    std::string action;
    if (auto it = req.params.find("action"); it != req.params.end()) action = it->second;
    if (action.empty() && !req.body.empty()) {
        const auto j = nlohmann::json::parse(req.body, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return error(400, "malformed_body", "control body must be a JSON object");
        if (auto it = j.find("action"); it != j.end() && it->is_string()) action = it->get<std::string>();
    }
    if (action.empty()) return error(400, "missing_action", "expected action=start|stop|reset|clear_logs");
    const auto a = control_action_from_string(action);
    if (!a) return error(400, "unknown_action", "unknown action '" + action + "'");
    return json_response(200, status_to_json(service.control(*a)));
}

ApiResponse report(CounterService& service, const ApiRequest& req) {
    const auto st = service.status();
    const std::uint64_t default_to = st->counts.timestamp_us + 1;
    const auto from = param_u64(req, "from", 0);
    const auto to = param_u64(req, "to", default_to);
    const auto bucket = param_u64(req, "bucket", kDefaultReportBucketUs);
    if (!from || !to || !bucket) return error(400, "invalid_parameter", "from, to and bucket must be unsigned microseconds");
    try {
        return json_response(200, report_to_json(service.report(*from, *to, *bucket)));
    } catch (const std::invalid_argument& e) {
        return error(400, "invalid_report_window", e.what());
    }
}

}  // namespace

ApiResponse handle_request(CounterService& service, const ApiRequest& req) {
    if (req.path.rfind(kPrefix, 0) != 0) return error(404, "not_found", "no route for " + req.path);
    const std::string route = req.path.substr(kPrefix.size());
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";

    if (route == "status") {
        if (!get) return error(405, "method_not_allowed", "use GET");
        return json_response(200, status_to_json(*service.status()));
    }
    if (route == "counts") {
        if (!get) return error(405, "method_not_allowed", "use GET");
        return json_response(200, counts_to_json(service.status()->counts));
    }
    if (route == "events") {
        if (!get) return error(405, "method_not_allowed", "use GET");
        return events_page(service, req);
    }
    if (route == "control") {
        if (!post) return error(405, "method_not_allowed", "use POST");
        return control(service, req);
    }
    if (route == "report") {
        if (!get) return error(405, "method_not_allowed", "use GET");
        return report(service, req);
    }
    if (route.rfind("snapshots/", 0) == 0) {
        if (!get) return error(405, "method_not_allowed", "use GET");
        const std::string id = route.substr(std::string_view("snapshots/").size());
        if (!is_valid_snapshot_id(id)) return error(404, "unknown_snapshot", "no snapshot '" + id + "'");
        auto bytes = service.snapshot(id);
        if (!bytes) return error(404, "unknown_snapshot", "no snapshot '" + id + "'");
        return {200, "image/x-portable-graymap", std::string(bytes->begin(), bytes->end())};
    }
    return error(404, "not_found", "no route for " + req.path);
}

struct HttpServer::Impl {
    CounterService& service;
    httplib::Server server;

    explicit Impl(CounterService& s) : service(s) {
        auto adapt = [this](const httplib::Request& in, httplib::Response& out) {
            ApiRequest req{in.method, in.path, {}, in.body};
            for (const auto& [k, v] : in.params) req.params.emplace(k, v);
            const ApiResponse resp = handle_request(service, req);
            out.status = resp.status;
            out.set_header("Access-Control-Allow-Origin", "*");
            out.set_content(resp.body, resp.content_type);
        };
        server.Get(R"(/api/v1/.*)", adapt);
        server.Post(R"(/api/v1/.*)", adapt);
        server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& out) {
            out.set_header("Access-Control-Allow-Origin", "*");
            out.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            out.set_header("Access-Control-Allow-Headers", "Content-Type");
            out.status = 204;
        });
        server.set_error_handler([](const httplib::Request& in, httplib::Response& out) {
            if (!out.body.empty()) return;
            ordered_json j;
            j["error"] = out.status == 404 ? "not_found" : "http_error";
            j["reason"] = "no route for " + in.path;
            out.set_content(j.dump(), "application/json");
        });
    }
};

HttpServer::HttpServer(CounterService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace doorcount
