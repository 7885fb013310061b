#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "doorcount/service.hpp"

namespace doorcount {

struct ApiRequest {
    std::string method;  // "GET", "POST"
    std::string path;
    std::map<std::string, std::string> params;  // query string and form fields
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

inline constexpr std::size_t kDefaultEventPage = 100;
inline constexpr std::size_t kMaxEventPage = 1000;
inline constexpr std::uint64_t kDefaultReportBucketUs = 60'000'000;

/// Routes one request against the service. Independent of the transport so
/// it can be exercised without sockets.
///
///   GET  /api/v1/status
///   GET  /api/v1/counts
///   GET  /api/v1/events?since_seq=N[&limit=M]
///   POST /api/v1/control            action=start|stop|reset|clear_logs (JSON body, form or query)
///   GET  /api/v1/report?from=&to=&bucket=   (microseconds)
///   GET  /api/v1/snapshots/{id}
///
/// Errors carry {"error": <code>, "reason": <text>}.
ApiResponse handle_request(CounterService& service, const ApiRequest& req);

/// HTTP/1.1 front end for handle_request.
class HttpServer {
public:
    explicit HttpServer(CounterService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace doorcount
