#pragma once

// Shared helpers for the test suites: a random position generator and an
// independent move/capture enumerator used as the oracle for rules-core.

#include <algorithm>
#include <random>
#include <vector>

#include "tafl/core.hpp"
#include "tafl/rules.hpp"

namespace tafl::testing {

struct RandomSpec {
    int min_side = 3;
    int max_side = 7;
    bool square = false;
    bool any_havens = false;  // havens anywhere, not only in the corners
    bool vary_config = true;
};

inline RuleConfig random_config(std::mt19937_64& rng) {
    RuleConfig c;
    std::uniform_int_distribution<int> coin(0, 1);
    c.throne_is_anvil = coin(rng);
    const ThroneAccess access[] = {ThroneAccess::KingOnly, ThroneAccess::AllNormal, ThroneAccess::AllThroughOnly};
    c.throne_access = access[std::uniform_int_distribution<int>(0, 2)(rng)];
    return c;
}

inline GameState random_position(std::mt19937_64& rng, const RandomSpec& spec = {}) {
    std::uniform_int_distribution<int> side(spec.min_side, spec.max_side);
    const int w = side(rng);
    const int h = spec.square ? w : side(rng);
    std::optional<Square> throne;
    if (w % 2 == 1 && h % 2 == 1 && std::uniform_int_distribution<int>(0, 3)(rng) != 0) throne = Square{w / 2, h / 2};
    std::vector<Square> havens;
    if (spec.any_havens) {
        const int n = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int i = 0; i < n; ++i) {
            Square s{std::uniform_int_distribution<int>(0, w - 1)(rng), std::uniform_int_distribution<int>(0, h - 1)(rng)};
            if ((!throne || !(s == *throne)) && std::find(havens.begin(), havens.end(), s) == havens.end())
                havens.push_back(s);
        }
    } else if (std::uniform_int_distribution<int>(0, 4)(rng) != 0) {
        havens = {{0, 0}, {0, h - 1}, {w - 1, 0}, {w - 1, h - 1}};
    }
    const RuleConfig cfg = spec.vary_config ? random_config(rng) : RuleConfig{};
    const bool with_king = std::uniform_int_distribution<int>(0, 4)(rng) != 0;
    GameState st(BoardGeometry(w, h, throne, havens), cfg, Side::Attacker, !with_king);

    std::vector<Square> free;
    for (int c = 0; c < w; ++c)
        for (int r = 0; r < h; ++r) {
            const Square s{c, r};
            if (st.geometry().is_haven(s) || st.geometry().is_throne(s)) continue;
            free.push_back(s);
        }
    std::shuffle(free.begin(), free.end(), rng);
    const int cells = static_cast<int>(free.size());
    const int attackers = std::min(cells / 3, std::uniform_int_distribution<int>(1, 8)(rng));
    const int defenders = std::min(cells / 4, std::uniform_int_distribution<int>(0, 5)(rng));
    std::size_t k = 0;
    if (with_king) {
        // The King may also start on the throne.
        if (throne && std::uniform_int_distribution<int>(0, 2)(rng) == 0) st.place(*throne, {Side::Defender, PieceKind::King});
        else st.place(free[k++], {Side::Defender, PieceKind::King});
    }
    for (int i = 0; i < attackers && k < free.size(); ++i) st.place(free[k++], {Side::Attacker, PieceKind::Soldier});
    for (int i = 0; i < defenders && k < free.size(); ++i) st.place(free[k++], {Side::Defender, PieceKind::Soldier});
    st.set_to_move(std::uniform_int_distribution<int>(0, 1)(rng) ? Side::Attacker : Side::Defender);
    st.reset_history();
    return st;
}

// ---------------------------------------------------------------------------
// Oracle: walks the board square by square with the rules written out plainly.
// Supports the throne-access levels KingOnly, AllNormal and AllThroughOnly and
// the default capture settings (hammer-and-anvil, no traps).

namespace naive {

inline bool mine(Cell c, Side s) {
    if (s == Side::Attacker) return c == Cell::AttackerSoldier;
    return c == Cell::DefenderSoldier || c == Cell::King;
}

inline bool decided(const GameState& st) {
    const BoardGeometry& g = st.geometry();
    bool king = false;
    int attackers = 0;
    for (int c = 0; c < g.width(); ++c)
        for (int r = 0; r < g.height(); ++r) {
            const Cell x = st.at(Square{c, r});
            if (x == Cell::King) {
                king = true;
                if (g.is_haven(Square{c, r})) return true;
            }
            attackers += x == Cell::AttackerSoldier;
        }
    if (!king && !st.fragment_mode()) return true;
    return attackers == 0;
}

inline std::vector<Move> moves(const GameState& st) {
    std::vector<Move> out;
    if (decided(st)) return out;
    const BoardGeometry& g = st.geometry();
    const ThroneAccess access = st.config().throne_access;
    const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (int r = 0; r < g.height(); ++r)
        for (int c = 0; c < g.width(); ++c) {
            const Cell p = st.at(Square{c, r});
            if (p == Cell::Empty || !mine(p, st.to_move())) continue;
            const bool king = p == Cell::King;
            for (const auto& d : dirs) {
                for (int k = 1;; ++k) {
                    const Square s{c + d[0] * k, r + d[1] * k};
                    if (s.col < 0 || s.row < 0 || s.col >= g.width() || s.row >= g.height()) break;
                    if (st.at(s) != Cell::Empty) break;
                    if (g.is_haven(s)) {
                        if (!king) break;
                        out.push_back({{c, r}, s});
                        continue;
                    }
                    if (g.is_throne(s) && !king) {
                        if (access == ThroneAccess::KingOnly) break;
                        if (access == ThroneAccess::AllThroughOnly) continue;
                    }
                    out.push_back({{c, r}, s});
                }
            }
        }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<Square> captures(const GameState& st, const Move& m) {
    const BoardGeometry& g = st.geometry();
    const Side me = st.to_move();
    std::vector<Square> out;
    const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    auto cell = [&](Square s) {
        if (s == m.from) return Cell::Empty;
        if (s == m.to) return st.at(m.from);
        return st.at(s);
    };
    for (const auto& d : dirs) {
        const Square victim{m.to.col + d[0], m.to.row + d[1]};
        const Square anvil{m.to.col + 2 * d[0], m.to.row + 2 * d[1]};
        if (!g.on_board(victim) || !g.on_board(anvil)) continue;
        const Cell v = cell(victim);
        if (v == Cell::Empty || mine(v, me)) continue;
        const Cell a = cell(anvil);
        const bool hostile = mine(a, me) || g.is_haven(anvil) ||
                             (st.config().throne_is_anvil && g.is_throne(anvil) && a == Cell::Empty);
        if (hostile) out.push_back(victim);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline bool ends_game(const GameState& st, const Move& m, const std::vector<Square>& caps) {
    const BoardGeometry& g = st.geometry();
    const Cell p = st.at(m.from);
    if (p == Cell::King && g.is_haven(m.to)) return true;
    int attackers = 0;
    for (int c = 0; c < g.width(); ++c)
        for (int r = 0; r < g.height(); ++r) attackers += st.at(Square{c, r}) == Cell::AttackerSoldier;
    if (st.to_move() == Side::Defender && !caps.empty() && static_cast<int>(caps.size()) == attackers) return true;
    if (st.to_move() == Side::Attacker && !st.fragment_mode())
        for (const Square& s : caps)
            if (st.at(s) == Cell::King) return true;
    return false;
}

// Moves with the forced-capture filter applied.
inline std::vector<Move> filtered(const GameState& st) {
    const auto all = moves(st);
    std::vector<Move> forcing;
    for (const Move& m : all) {
        const auto caps = captures(st, m);
        if (!caps.empty() || ends_game(st, m, caps)) forcing.push_back(m);
    }
    return forcing.empty() ? all : forcing;
}

}  // namespace naive

}  // namespace tafl::testing
