#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "tafl/core.hpp"
#include "tafl/solver.hpp"

namespace tafl::api {

using json = nlohmann::json;

// Field names follow RuleConfig; enum values use their C++ spelling
// ("KingOnly", "HammerAnvil", ...), sides are "attacker" / "defender".
json config_to_json(const RuleConfig& c);
// Missing fields keep their defaults. Throws std::invalid_argument on unknown
// fields or values.
RuleConfig config_from_json(const json& j);

json state_json(const GameState& st);  // fen, to_move, forced, legal_moves, terminal, board

struct Response {
    int status = 200;
    json body;
};

// In-memory game sessions behind the HTTP service. Every call returns the
// HTTP status it maps to; errors carry {"error": <code>, "message": ...}.
class SessionManager {
public:
    SessionManager() = default;
    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    // {"fen"?: string, "config"?: object}; Brandubh when fen is absent.
    Response create(const json& body);
    Response get(const std::string& id) const;
    // {"move": "b4-b7"} or {"from": "b4", "to": "b7"}
    Response post_move(const std::string& id, const json& body);
    Response hint(const std::string& id, int max_plies, std::optional<std::uint64_t> node_budget);
    Response status(const std::string& id) const;
    Response remove(const std::string& id);

    std::size_t size() const;

private:
    struct Session {
        std::string id;
        std::string initial_fen;
        RuleConfig config;
        GameState state;
        std::vector<std::string> log;
        std::map<std::pair<std::uint64_t, int>, json> hints;  // (hash, max_plies) -> hint
        mutable std::mutex mutex;
        Session(std::string i, std::string fen, RuleConfig c, GameState s)
            : id(std::move(i)), initial_fen(std::move(fen)), config(c), state(std::move(s)) {}
    };
    std::shared_ptr<Session> find(const std::string& id) const;
    static json session_json(const Session& s);

    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

// Port from TAFL_PORT, else 8080.
int default_port();

}  // namespace tafl::api
