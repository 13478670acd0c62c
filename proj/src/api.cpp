#include "tafl/api.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "tafl/notation.hpp"
#include "tafl/rules.hpp"

namespace tafl::api {

namespace {

template <typename E>
struct EnumNames {
    std::vector<std::pair<E, const char*>> items;

    const char* name(E e) const {
        for (const auto& [v, n] : items)
            if (v == e) return n;
        return "?";
    }
    E parse(const json& j, const char* field) const {
        if (!j.is_string()) throw std::invalid_argument(std::string(field) + " must be a string");
        const auto s = j.get<std::string>();
        for (const auto& [v, n] : items)
            if (s == n) return v;
        throw std::invalid_argument("unknown " + std::string(field) + " '" + s + "'");
    }
};

const EnumNames<KingCapturePower> kPower{{{KingCapturePower::Full, "Full"},
                                          {KingCapturePower::NoHammer, "NoHammer"},
                                          {KingCapturePower::NoParticipation, "NoParticipation"}}};
const EnumNames<KingCaptureMode> kMode{{{KingCaptureMode::HammerAnvil, "HammerAnvil"},
                                        {KingCaptureMode::TrapOnly, "TrapOnly"},
                                        {KingCaptureMode::TrapNoEdges, "TrapNoEdges"}}};
const EnumNames<ThroneAccess> kThrone{{{ThroneAccess::KingOnly, "KingOnly"},
                                       {ThroneAccess::KingThroughOnceOnly, "KingThroughOnceOnly"},
                                       {ThroneAccess::DefendersThroughOnly, "DefendersThroughOnly"},
                                       {ThroneAccess::AllThroughOnly, "AllThroughOnly"},
                                       {ThroneAccess::DefendersThroughAndStop, "DefendersThroughAndStop"},
                                       {ThroneAccess::AllNormal, "AllNormal"},
                                       {ThroneAccess::KingThroughNotBack, "KingThroughNotBack"}}};
const EnumNames<Side> kSide{{{Side::Attacker, "attacker"}, {Side::Defender, "defender"}}};

bool get_bool(const json& j, const char* field) {
    if (!j.is_boolean()) throw std::invalid_argument(std::string(field) + " must be a boolean");
    return j.get<bool>();
}

Response error(int status, const std::string& code, const std::string& message, json extra = json::object()) {
    extra["error"] = code;
    extra["message"] = message;
    return {status, extra};
}

json moves_json(const std::vector<Move>& ms) {
    json a = json::array();
    for (const Move& m : ms) a.push_back(move_name(m));
    return a;
}

}  // namespace

json config_to_json(const RuleConfig& c) {
    return {
        {"forced_capture", c.forced_capture},
        {"traps", c.traps},
        {"king_protected_on_throne", c.king_protected_on_throne},
        {"throne_is_anvil", c.throne_is_anvil},
        {"king_capture_power", kPower.name(c.king_capture_power)},
        {"throne_access", kThrone.name(c.throne_access)},
        {"king_capture_mode", kMode.name(c.king_capture_mode)},
        {"edge_escape", c.edge_escape},
        {"first_mover", kSide.name(c.first_mover)},
    };
}

RuleConfig config_from_json(const json& j) {
    RuleConfig c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw std::invalid_argument("config must be an object");
    for (const auto& [key, v] : j.items()) {
        if (key == "forced_capture") c.forced_capture = get_bool(v, "forced_capture");
        else if (key == "traps") c.traps = get_bool(v, "traps");
        else if (key == "king_protected_on_throne") c.king_protected_on_throne = get_bool(v, "king_protected_on_throne");
        else if (key == "throne_is_anvil") c.throne_is_anvil = get_bool(v, "throne_is_anvil");
        else if (key == "king_capture_power") c.king_capture_power = kPower.parse(v, "king_capture_power");
        else if (key == "throne_access") c.throne_access = kThrone.parse(v, "throne_access");
        else if (key == "king_capture_mode") c.king_capture_mode = kMode.parse(v, "king_capture_mode");
        else if (key == "edge_escape") c.edge_escape = get_bool(v, "edge_escape");
        else if (key == "first_mover") c.first_mover = kSide.parse(v, "first_mover");
        else throw std::invalid_argument("unknown config field '" + key + "'");
    }
    return c;
}

json state_json(const GameState& st) {
    std::vector<Move> legal = legal_moves(st);
    std::sort(legal.begin(), legal.end());
    json rows = json::array();
    const BoardGeometry& g = st.geometry();
    for (int row = g.height() - 1; row >= 0; --row) {
        std::string line;
        for (int col = 0; col < g.width(); ++col) {
            const Square s{col, row};
            switch (st.at(s)) {
                case Cell::AttackerSoldier: line += 'p'; break;
                case Cell::DefenderSoldier: line += 'P'; break;
                case Cell::King: line += 'K'; break;
                case Cell::Empty: line += g.is_haven(s) ? '#' : g.is_throne(s) ? '+' : '.'; break;
            }
        }
        rows.push_back(line);
    }
    json havens = json::array();
    for (const Square& h : g.havens()) havens.push_back(square_name(h));
    return {
        {"fen", emit_fen(st)},
        {"width", g.width()},
        {"height", g.height()},
        {"to_move", side_name(st.to_move())},
        {"forced", forced_active(st)},
        {"legal_moves", moves_json(legal)},
        {"terminal", terminal_name(terminal_status(st))},
        {"throne", g.throne() ? json(square_name(*g.throne())) : json(nullptr)},
        {"havens", havens},
        {"board", rows},
    };
}

json SessionManager::session_json(const Session& s) {
    json j = state_json(s.state);
    j["id"] = s.id;
    j["initial_fen"] = s.initial_fen;
    j["config"] = config_to_json(s.config);
    j["move_log"] = s.log;
    return j;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionManager::size() const {
    std::shared_lock lock(mutex_);
    return sessions_.size();
}

Response SessionManager::create(const json& body) {
    if (!body.is_object() && !body.is_null()) return error(400, "bad-request", "body must be a JSON object");
    RuleConfig config;
    try {
        config = config_from_json(body.is_object() && body.contains("config") ? body["config"] : json());
    } catch (const std::invalid_argument& e) {
        return error(400, "bad-config", e.what());
    }
    std::optional<GameState> st;
    try {
        if (body.is_object() && body.contains("fen")) {
            if (!body["fen"].is_string()) return error(400, "bad-request", "fen must be a string");
            st = parse_fen(body["fen"].get<std::string>(), config);
        } else {
            st = brandubh(config);
        }
    } catch (const ParseError& e) {
        return error(400, "bad-fen", e.what(), {{"line", e.line()}, {"column", e.column()}});
    } catch (const std::exception& e) {
        return error(400, "bad-fen", e.what());
    }
    std::shared_ptr<Session> s;
    {
        std::unique_lock lock(mutex_);
        const std::string id = "s" + std::to_string(next_id_++);
        s = std::make_shared<Session>(id, emit_fen(*st), config, std::move(*st));
        sessions_[id] = s;
    }
    std::lock_guard g(s->mutex);
    return {201, session_json(*s)};
}

Response SessionManager::get(const std::string& id) const {
    auto s = find(id);
    if (!s) return error(404, "no-such-session", "no session " + id);
    std::lock_guard g(s->mutex);
    return {200, session_json(*s)};
}

Response SessionManager::status(const std::string& id) const {
    auto s = find(id);
    if (!s) return error(404, "no-such-session", "no session " + id);
    std::lock_guard g(s->mutex);
    return {200,
            {{"id", s->id},
             {"terminal", terminal_name(terminal_status(s->state))},
             {"to_move", side_name(s->state.to_move())},
             {"plies", s->log.size()}}};
}

Response SessionManager::remove(const std::string& id) {
    std::unique_lock lock(mutex_);
    if (!sessions_.erase(id)) return error(404, "no-such-session", "no session " + id);
    return {200, {{"id", id}, {"deleted", true}}};
}

Response SessionManager::post_move(const std::string& id, const json& body) {
    auto s = find(id);
    if (!s) return error(404, "no-such-session", "no session " + id);
    Move m;
    try {
        if (!body.is_object()) return error(400, "bad-request", "body must be a JSON object");
        if (body.contains("move") && body["move"].is_string()) m = parse_move(body["move"].get<std::string>());
        else if (body.contains("from") && body.contains("to") && body["from"].is_string() && body["to"].is_string())
            m = {parse_square(body["from"].get<std::string>()), parse_square(body["to"].get<std::string>())};
        else return error(400, "bad-request", "expected {\"move\": \"b4-b7\"} or {\"from\", \"to\"}");
    } catch (const ParseError& e) {
        return error(400, "bad-move", e.what());
    }
    std::lock_guard g(s->mutex);
    if (auto err = check_move(s->state, m)) {
        json extra = {{"move", move_name(m)}};
        if (*err == MoveError::NotForced) {
            std::vector<Move> forced = legal_moves(s->state);
            std::sort(forced.begin(), forced.end());
            extra["forced_moves"] = moves_json(forced);
        }
        return error(422, reason_code(*err), std::string("move ") + move_name(m) + " rejected: " + reason_code(*err),
                     extra);
    }
    auto [next, result] = apply_move(s->state, m);
    s->state = std::move(next);
    s->log.push_back(move_name(m));
    json captures = json::array();
    for (const Square& c : result.captures) captures.push_back(square_name(c));
    json out = session_json(*s);
    out["accepted"] = move_name(m);
    out["captures"] = captures;
    return {200, out};
}

Response SessionManager::hint(const std::string& id, int max_plies, std::optional<std::uint64_t> node_budget) {
    if (max_plies < 1 || max_plies > 64) return error(400, "bad-request", "max_plies must be within 1..64");
    auto s = find(id);
    if (!s) return error(404, "no-such-session", "no session " + id);
    std::lock_guard g(s->mutex);
    const GameState& st = s->state;
    if (terminal_status(st) != Terminal::None) return error(409, "game-over", "the game is already decided");
    const auto key = std::make_pair(st.hash() ^ (static_cast<std::uint64_t>(st.history().size()) << 48), max_plies);
    if (!node_budget)
        if (auto it = s->hints.find(key); it != s->hints.end()) return {200, it->second};

    const SearchLimits limits{max_plies, node_budget, std::nullopt};
    const Verdict win = st.to_move() == Side::Attacker ? Verdict::AttackerWin : Verdict::DefenderWin;
    const Outcome o = solve(st, limits);
    json h = {{"verdict", verdict_name(o.verdict)}, {"max_plies", max_plies}, {"nodes", o.nodes},
              {"budget_exceeded", o.budget_exceeded}};
    if (o.plies) h["plies"] = *o.plies;
    if (o.verdict == win && !o.line.empty()) {
        h["move"] = move_name(o.line.front());
        h["line"] = moves_json(o.line);
    } else {
        // No proven win: prefer a move that does not lose, else the slowest loss.
        const auto values = evaluate_moves(st, limits);
        const MoveValue* best = nullptr;
        for (const auto& v : values) {
            const bool loses = v.verdict != win && (v.verdict == Verdict::AttackerWin || v.verdict == Verdict::DefenderWin);
            if (!loses) {
                best = &v;
                break;
            }
            if (!best || v.plies.value_or(0) > best->plies.value_or(0)) best = &v;
        }
        h["move"] = best ? json(move_name(best->move)) : json(nullptr);
        h["line"] = json::array();
    }
    if (!node_budget) s->hints[key] = h;
    return {200, h};
}

int default_port() {
    if (const char* p = std::getenv("TAFL_PORT")) {
        try {
            const int v = std::stoi(p);
            if (v > 0 && v < 65536) return v;
        } catch (const std::exception&) {
        }
    }
    return 8080;
}

}  // namespace tafl::api
