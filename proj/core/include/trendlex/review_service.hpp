#pragma once

#include <memory>
#include <string>

namespace trendlex {

struct ReviewServiceOptions {
    std::string runs_dir;              // parent of the run directories
    std::string cors_origin = "*";
};

struct HttpReply {
    int status = 200;
    std::string body;  // JSON
};

/// JSON API over persisted runs:
///   GET  /api/runs
///   GET  /api/runs/{id}/candidates
///   POST /api/runs/{id}/verdicts
///   POST /api/runs/{id}/promote
class ReviewService {
public:
    explicit ReviewService(ReviewServiceOptions options);
    ~ReviewService();
    ReviewService(const ReviewService&) = delete;
    ReviewService& operator=(const ReviewService&) = delete;

    /// Routes one request without a socket.
    HttpReply handle(const std::string& method, const std::string& path,
                     const std::string& body) const;

    /// Binds and serves until stop(). Returns false if binding failed.
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port, serves on a background thread, returns the port.
    int start_background(const std::string& host = "127.0.0.1");
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace trendlex
