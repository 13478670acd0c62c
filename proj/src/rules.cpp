#include "tafl/rules.hpp"

#include <algorithm>
#include <array>

namespace tafl {

namespace {

constexpr std::array<std::array<int, 2>, 4> kDirs{{{0, 1}, {0, -1}, {1, 0}, {-1, 0}}};

bool throne_pass_allowed(const GameState& st, Cell c) {
    const ThroneAccess a = st.config().throne_access;
    if (c == Cell::King) {
        if (a == ThroneAccess::KingThroughOnceOnly) return !st.king_left_throne();
        return true;
    }
    switch (a) {
        case ThroneAccess::DefendersThroughOnly:
        case ThroneAccess::DefendersThroughAndStop: return c == Cell::DefenderSoldier;
        case ThroneAccess::AllThroughOnly:
        case ThroneAccess::AllNormal: return true;
        default: return false;
    }
}

bool throne_land_allowed(const GameState& st, Cell c) {
    const ThroneAccess a = st.config().throne_access;
    if (c == Cell::King) {
        if (a == ThroneAccess::KingThroughOnceOnly || a == ThroneAccess::KingThroughNotBack)
            return !st.king_left_throne();
        return true;
    }
    switch (a) {
        case ThroneAccess::DefendersThroughAndStop: return c == Cell::DefenderSoldier;
        case ThroneAccess::AllNormal: return true;
        default: return false;
    }
}

// Board after the moving piece has gone from `from` to `to`, before captures.
struct AfterView {
    const GameState& st;
    int from;
    int to;
    Cell piece;
    Cell at(int idx) const {
        if (idx == to) return piece;
        if (idx == from) return Cell::Empty;
        return st.at(idx);
    }
};

bool hostile_for_trap(const AfterView& v, Side mover, int col, int row, bool edges_count) {
    const BoardGeometry& g = v.st.geometry();
    if (!g.on_board(col, row)) return edges_count;
    const int idx = g.index(Square{col, row});
    if (g.is_haven(idx)) return true;
    const Cell c = v.at(idx);
    if (g.is_throne(idx) && c == Cell::Empty) return true;
    if (!owned_by(c, mover)) return false;
    if (c == Cell::King && v.st.config().king_capture_power == KingCapturePower::NoParticipation)
        return false;
    return true;
}

bool surrounded(const AfterView& v, Side mover, Square t, bool edges_count) {
    for (const auto& d : kDirs)
        if (!hostile_for_trap(v, mover, t.col + d[0], t.row + d[1], edges_count)) return false;
    return true;
}

bool protected_by_throne(const AfterView& v, Square t) {
    const GameState& st = v.st;
    if (!st.config().king_protected_on_throne) return false;
    const auto& throne = st.geometry().throne();
    if (!throne || v.at(st.geometry().index(*throne)) != Cell::King) return false;
    return std::abs(t.col - throne->col) + std::abs(t.row - throne->row) == 1;
}

std::vector<Square> compute_captures(const GameState& st, int from, int to) {
    const BoardGeometry& g = st.geometry();
    const Cell piece = st.at(from);
    const Side mover = is_attacker(piece) ? Side::Attacker : Side::Defender;
    const RuleConfig& cfg = st.config();
    std::vector<Square> out;
    if (piece == Cell::King && cfg.king_capture_power != KingCapturePower::Full) return out;

    const AfterView v{st, from, to, piece};
    const Square dest = g.square(to);
    for (const auto& d : kDirs) {
        const Square t{dest.col + d[0], dest.row + d[1]};
        if (!g.on_board(t)) continue;
        const Cell tc = v.at(g.index(t));
        if (tc == Cell::Empty || owned_by(tc, mover)) continue;

        bool taken = false;
        if (tc == Cell::King && cfg.king_capture_mode != KingCaptureMode::HammerAnvil) {
            const bool edges = cfg.king_capture_mode == KingCaptureMode::TrapOnly;
            taken = surrounded(v, mover, t, edges);
        } else {
            const Square a{t.col + d[0], t.row + d[1]};
            if (g.on_board(a)) {
                const int ai = g.index(a);
                const Cell ac = v.at(ai);
                if (owned_by(ac, mover)) {
                    taken = !(ac == Cell::King &&
                              cfg.king_capture_power == KingCapturePower::NoParticipation);
                } else if (g.is_haven(ai)) {
                    taken = true;
                } else if (g.is_throne(ai) && cfg.throne_is_anvil && ac == Cell::Empty) {
                    taken = true;
                }
            }
            if (!taken && cfg.traps) taken = surrounded(v, mover, t, true);
        }
        if (taken && tc == Cell::DefenderSoldier && protected_by_throne(v, t)) taken = false;
        if (taken) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Terminal terminal_after(const GameState& st, int from, int to, const std::vector<Square>& caps) {
    const BoardGeometry& g = st.geometry();
    const Cell piece = st.at(from);
    if (piece == Cell::King) {
        if (g.is_haven(to)) return Terminal::DefenderWin;
        if (st.config().edge_escape && g.on_edge(g.square(to))) return Terminal::DefenderWin;
    }
    if (is_defender(piece)) {
        if (st.count(Side::Attacker) == static_cast<int>(caps.size()) && !caps.empty())
            return Terminal::DefenderWin;
    } else {
        for (const Square& s : caps)
            if (st.at(s) == Cell::King && !st.fragment_mode()) return Terminal::AttackerWin;
    }
    return Terminal::None;
}

void generate(const GameState& st, std::vector<Move>& out) {
    const BoardGeometry& g = st.geometry();
    const Side side = st.to_move();
    const int n = g.cell_count();
    for (int idx = 0; idx < n; ++idx) {
        const Cell c = st.at(idx);
        if (c == Cell::Empty || !owned_by(c, side)) continue;
        const Square from = g.square(idx);
        for (const auto& d : kDirs) {
            Square s{from.col + d[0], from.row + d[1]};
            while (g.on_board(s)) {
                const int si = g.index(s);
                if (st.at(si) != Cell::Empty) break;
                bool pass = true;
                bool land = true;
                if (g.is_haven(si)) {
                    pass = land = (c == Cell::King);
                } else if (g.is_throne(si)) {
                    pass = throne_pass_allowed(st, c);
                    land = throne_land_allowed(st, c);
                }
                if (land) out.push_back(Move{from, s});
                if (!pass) break;
                s.col += d[0];
                s.row += d[1];
            }
        }
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

const char* reason_code(MoveError e) {
    switch (e) {
        case MoveError::NoPiece: return "no-piece";
        case MoveError::NotYourPiece: return "not-your-piece";
        case MoveError::OffBoard: return "off-board";
        case MoveError::NotStraight: return "not-straight";
        case MoveError::PathBlocked: return "path-blocked";
        case MoveError::ThroneRestricted: return "throne-restricted";
        case MoveError::HavenRestricted: return "haven-restricted";
        case MoveError::NotForced: return "not-forced";
        case MoveError::GameOver: return "game-over";
    }
    return "unknown";
}

Terminal static_terminal(const GameState& st) {
    const auto k = st.king();
    if (k) {
        if (st.geometry().is_haven(*k)) return Terminal::DefenderWin;
        if (st.config().edge_escape && st.geometry().on_edge(*k)) return Terminal::DefenderWin;
    } else if (!st.fragment_mode()) {
        return Terminal::AttackerWin;
    }
    if (st.count(Side::Attacker) == 0) return Terminal::DefenderWin;
    return Terminal::None;
}

std::vector<Move> pseudo_legal_moves(const GameState& st) {
    std::vector<Move> out;
    if (static_terminal(st) != Terminal::None) return out;
    generate(st, out);
    return out;
}

std::vector<ScoredMove> scored_legal_moves(const GameState& st) {
    std::vector<ScoredMove> all;
    const std::vector<Move> moves = pseudo_legal_moves(st);
    all.reserve(moves.size());
    bool any_forcing = false;
    const BoardGeometry& g = st.geometry();
    for (const Move& m : moves) {
        const int from = g.index(m.from);
        const int to = g.index(m.to);
        ScoredMove sm{m, {}};
        sm.result.captures = compute_captures(st, from, to);
        sm.result.terminal = terminal_after(st, from, to, sm.result.captures);
        any_forcing |= !sm.result.captures.empty() || sm.result.terminal != Terminal::None;
        all.push_back(std::move(sm));
    }
    if (st.config().forced_capture && any_forcing) {
        std::erase_if(all, [](const ScoredMove& sm) {
            return sm.result.captures.empty() && sm.result.terminal == Terminal::None;
        });
    }
    return all;
}

std::vector<Move> legal_moves(const GameState& st) {
    std::vector<Move> out;
    for (auto& sm : scored_legal_moves(st)) out.push_back(sm.move);
    return out;
}

bool forced_active(const GameState& st) {
    if (!st.config().forced_capture) return false;
    for (const auto& sm : scored_legal_moves(st))
        if (!sm.result.captures.empty() || sm.result.terminal != Terminal::None) return true;
    return false;
}

namespace {

std::optional<MoveError> check_geometry(const GameState& st, const Move& m) {
    const BoardGeometry& g = st.geometry();
    if (!g.on_board(m.from) || !g.on_board(m.to)) return MoveError::OffBoard;
    const Cell c = st.at(m.from);
    if (c == Cell::Empty) return MoveError::NoPiece;
    if (!owned_by(c, st.to_move())) return MoveError::NotYourPiece;
    if (m.from == m.to || (m.from.col != m.to.col && m.from.row != m.to.row))
        return MoveError::NotStraight;
    const int dc = (m.to.col > m.from.col) - (m.to.col < m.from.col);
    const int dr = (m.to.row > m.from.row) - (m.to.row < m.from.row);
    Square s{m.from.col + dc, m.from.row + dr};
    while (true) {
        const int si = g.index(s);
        if (st.at(si) != Cell::Empty) return MoveError::PathBlocked;
        const bool last = s == m.to;
        if (g.is_haven(si) && c != Cell::King) return MoveError::HavenRestricted;
        if (g.is_throne(si)) {
            const bool ok = last ? throne_land_allowed(st, c) : throne_pass_allowed(st, c);
            if (!ok) return MoveError::ThroneRestricted;
        }
        if (last) break;
        s.col += dc;
        s.row += dr;
    }
    return std::nullopt;
}

}  // namespace

std::vector<Square> captures_of(const GameState& st, const Move& m) {
    if (auto err = check_geometry(st, m))
        throw IllegalMove(*err, std::string("illegal move: ") + reason_code(*err));
    const BoardGeometry& g = st.geometry();
    return compute_captures(st, g.index(m.from), g.index(m.to));
}

std::optional<MoveError> check_move(const GameState& st, const Move& m) {
    if (static_terminal(st) != Terminal::None) return MoveError::GameOver;
    if (auto err = check_geometry(st, m)) return err;
    if (st.config().forced_capture) {
        const auto legal = legal_moves(st);
        if (std::find(legal.begin(), legal.end(), m) == legal.end()) return MoveError::NotForced;
    }
    return std::nullopt;
}

GameState apply_unchecked(const GameState& st, const Move& m, const MoveResult& result) {
    GameState next = st;
    const BoardGeometry& g = st.geometry();
    const int from = g.index(m.from);
    const int to = g.index(m.to);
    const Cell piece = st.at(from);
    next.set_cell(from, Cell::Empty);
    next.set_cell(to, piece);
    for (const Square& s : result.captures) next.set_cell(g.index(s), Cell::Empty);
    if (piece == Cell::King && g.is_throne(from) && !next.king_left_throne_) {
        next.king_left_throne_ = true;
        next.hash_ ^= zobrist_throne_flag_key();
    }
    next.to_move_ = opponent(st.to_move_);
    next.hash_ ^= zobrist_mover_key();
    next.history_.push_back(next.hash_);
    return next;
}

std::pair<GameState, MoveResult> apply_move(const GameState& st, const Move& m) {
    if (auto err = check_move(st, m))
        throw IllegalMove(*err, std::string("illegal move: ") + reason_code(*err));
    const BoardGeometry& g = st.geometry();
    MoveResult r;
    r.captures = compute_captures(st, g.index(m.from), g.index(m.to));
    GameState next = apply_unchecked(st, m, r);
    r.terminal = terminal_status(next);
    return {std::move(next), std::move(r)};
}

Terminal terminal_status(const GameState& st) {
    const Terminal t = static_terminal(st);
    if (t != Terminal::None) return t;
    std::vector<Move> moves;
    generate(st, moves);
    if (moves.empty())
        return st.to_move() == Side::Attacker ? Terminal::DefenderWin : Terminal::AttackerWin;
    return Terminal::None;
}

}  // namespace tafl
