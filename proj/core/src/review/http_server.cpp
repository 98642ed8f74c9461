// SPDX-FileCopyrightText: 2026 The gridscan authors
// SPDX-License-Identifier: Apache-2.0

#include "gridscan/review/http_server.hpp"

#include <httplib.h>

namespace gridscan {

struct ReviewServer::Impl {
    ReviewService& service;
    httplib::Server server;
};

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    send_json(res, status, {{"code", code}, {"message", message}});
}

std::size_t segment_id(const httplib::Request& req) {
    try {
        return std::stoull(req.matches[1].str());
    } catch (const std::exception&) {
        throw NotFoundError("unknown segment " + req.matches[1].str());
    }
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const NotFoundError& e) {
            send_error(res, 404, "not_found", e.what());
        } catch (const ValidationError& e) {
            send_error(res, 422, "invalid_review", e.what());
        } catch (const std::invalid_argument& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    };
}

}  // namespace

ReviewServer::ReviewServer(ReviewService& service) : impl_(new Impl{service, {}}) {
    auto& svc = impl_->service;
    auto& srv = impl_->server;

    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    srv.Get("/api/segments", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        bool flagged_only = false;
        if (req.has_param("flagged")) {
            const auto v = req.get_param_value("flagged");
            if (v == "true") {
                flagged_only = true;
            } else if (v != "false") {
                throw std::invalid_argument("flagged must be true or false");
            }
        }
        send_json(res, 200, svc.list_segments(flagged_only));
    }));

    srv.Get(R"(/api/segments/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, svc.segment_envelope(segment_id(req)));
    }));

    srv.Get(R"(/api/segments/([^/]+)/points)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        auto payload = svc.get_segment_payload(segment_id(req));
        res.status = 200;
        res.set_header("X-Point-Count", std::to_string(payload.envelope.at("point_count").get<std::size_t>()));
        res.set_content(std::move(payload.binary), "application/octet-stream");
    }));

    srv.Post("/api/reviews", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument(std::string("request body is not JSON: ") + e.what());
        }
        const auto ack = svc.post_review(ReviewDecision::from_json(body, svc.schema().get()));
        send_json(res, 201, ack.to_json());
    }));

    srv.Get("/api/report", guarded([&svc](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, svc.report());
    }));

    srv.Get("/api/report/reviewed", guarded([&svc](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, svc.reviewed_report());
    }));

    srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.body.empty()) {
            const std::string code = res.status == 404 ? "not_found" : "http_" + std::to_string(res.status);
            send_error(res, res.status, code, req.method + " " + req.path);
        }
    });
}

ReviewServer::~ReviewServer() { stop(); }

bool ReviewServer::mount_static(const std::filesystem::path& dir) { return impl_->server.set_mount_point("/", dir.string()); }

bool ReviewServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int ReviewServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool ReviewServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ReviewServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ReviewServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace gridscan
