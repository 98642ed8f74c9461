// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#ifndef GRIDSCAN_REVIEW_HTTP_SERVER_HPP
#define GRIDSCAN_REVIEW_HTTP_SERVER_HPP

#include <filesystem>
#include <memory>
#include <string>

#include "gridscan/review/review.hpp"

namespace gridscan {

/// HTTP front end for a ReviewService. Routes:
///   GET  /api/segments?flagged=true|false
///   GET  /api/segments/{id}          envelope
///   GET  /api/segments/{id}/points   binary block (application/octet-stream)
///   POST /api/reviews                ReviewDecision JSON, answers with the log seq
///   GET  /api/report
///   GET  /api/report/reviewed        replays the log, writes report.reviewed.json
/// Errors are JSON {code, message}.
class ReviewServer {
public:
    explicit ReviewServer(ReviewService& service);
    ~ReviewServer();
    ReviewServer(const ReviewServer&) = delete;
    ReviewServer& operator=(const ReviewServer&) = delete;

    /// Serves files under `dir` at "/" (for the browser client).
    bool mount_static(const std::filesystem::path& dir);

    /// Blocks until stop(). Returns false if the socket could not be bound.
    bool listen(const std::string& host, int port);
    /// Binds to a free port and returns it, or -1. Then call listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace gridscan

#endif  // GRIDSCAN_REVIEW_HTTP_SERVER_HPP
