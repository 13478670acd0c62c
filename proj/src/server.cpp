#include "tafl/server.hpp"

#include <httplib.h>

namespace tafl::api {

namespace {

void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

bool parse_body(const httplib::Request& req, httplib::Response& res, json& out) {
    if (req.body.empty()) {
        out = json::object();
        return true;
    }
    out = json::parse(req.body, nullptr, false);
    if (out.is_discarded()) {
        send(res, {400, {{"error", "bad-json"}, {"message", "request body is not valid JSON"}}});
        return false;
    }
    return true;
}

template <typename T>
bool query_number(const httplib::Request& req, httplib::Response& res, const char* name, T& out) {
    if (!req.has_param(name)) return true;
    try {
        out = static_cast<T>(std::stoll(req.get_param_value(name)));
        return true;
    } catch (const std::exception&) {
        send(res, {400, {{"error", "bad-request"}, {"message", std::string(name) + " must be an integer"}}});
        return false;
    }
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        send(res, {200, {{"ok", true}}});
    });
    server.Post("/sessions", [&sessions](const httplib::Request& req, httplib::Response& res) {
        json body;
        if (parse_body(req, res, body)) send(res, sessions.create(body));
    });
    server.Get(R"(/sessions/([^/]+))", [&sessions](const httplib::Request& req, httplib::Response& res) {
        send(res, sessions.get(req.matches[1]));
    });
    server.Delete(R"(/sessions/([^/]+))", [&sessions](const httplib::Request& req, httplib::Response& res) {
        send(res, sessions.remove(req.matches[1]));
    });
    server.Post(R"(/sessions/([^/]+)/moves)", [&sessions](const httplib::Request& req, httplib::Response& res) {
        json body;
        if (parse_body(req, res, body)) send(res, sessions.post_move(req.matches[1], body));
    });
    server.Get(R"(/sessions/([^/]+)/hint)", [&sessions](const httplib::Request& req, httplib::Response& res) {
        int max_plies = 6;
        long long budget = 0;
        if (!query_number(req, res, "max_plies", max_plies) || !query_number(req, res, "node_budget", budget)) return;
        std::optional<std::uint64_t> nb;
        if (budget > 0) nb = static_cast<std::uint64_t>(budget);
        send(res, sessions.hint(req.matches[1], max_plies, nb));
    });
    server.Get(R"(/sessions/([^/]+)/status)", [&sessions](const httplib::Request& req, httplib::Response& res) {
        send(res, sessions.status(req.matches[1]));
    });
}

}  // namespace tafl::api
