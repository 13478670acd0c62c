#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tafl/notation.hpp"
#include "tafl/rules.hpp"
#include "tafl/solver.hpp"

using namespace tafl;
namespace naive = tafl::testing::naive;

namespace {

// Board rows of the figure frames along the Brandubh line.
const char* kAfterPly2 = "2Pp3/3p3/3P3/p2KPpp/3P3/3p3/3p3";
const char* kAfterPly4 = "2P1P2/3p3/3P3/2pK1pp/3P3/3p3/3p3";

std::string rows_of(const GameState& st) {
    const std::string fen = emit_fen(st);
    const auto a = fen.find(' ') + 1;
    return fen.substr(a, fen.find(' ', a) - a);
}

std::vector<Move> line(std::initializer_list<const char*> names) {
    std::vector<Move> out;
    for (const char* n : names) out.push_back(parse_move(n));
    return out;
}

// Move applied with the oracle's capture set; no engine code involved.
GameState naive_apply(const GameState& st, const Move& m) {
    GameState next = st;
    const auto caps = naive::captures(st, m);
    const Piece p = *st.piece_at(m.from);
    for (const Square& c : caps) next.remove(c);
    next.remove(m.from);
    next.place(m.to, p);
    next.set_to_move(opponent(st.to_move()));
    return next;
}

std::optional<Side> naive_winner(const GameState& st) {
    if (naive::decided(st)) {
        const auto k = st.king();
        if (k && st.geometry().is_haven(*k)) return Side::Defender;
        if (!k && !st.fragment_mode()) return Side::Attacker;
        return Side::Defender;
    }
    if (naive::moves(st).empty()) return opponent(st.to_move());
    return std::nullopt;
}

struct Value {
    Verdict verdict = Verdict::Unknown;
    int plies = 0;
};

Verdict win_for(Side s) { return s == Side::Attacker ? Verdict::AttackerWin : Verdict::DefenderWin; }

// Plain minimax over the oracle's filtered moves, no pruning and no table.
Value naive_value(const GameState& st, int depth) {
    if (auto w = naive_winner(st)) return {win_for(*w), 0};
    if (depth == 0) return {};
    const Verdict mine = win_for(st.to_move());
    const Verdict theirs = win_for(opponent(st.to_move()));
    int fastest = -1;
    int slowest = -1;
    bool all_lose = true;
    for (const Move& m : naive::filtered(st)) {
        const Value v = naive_value(naive_apply(st, m), depth - 1);
        if (v.verdict == mine && (fastest < 0 || v.plies + 1 < fastest)) fastest = v.plies + 1;
        if (v.verdict == theirs) slowest = std::max(slowest, v.plies + 1);
        else all_lose = false;
    }
    if (fastest >= 0) return {mine, fastest};
    if (all_lose) return {theirs, slowest};
    return {};
}

std::uint64_t naive_perft(const GameState& st, int depth) {
    if (depth == 0) return 1;
    std::uint64_t n = 0;
    for (const Move& m : naive::filtered(st)) n += naive_perft(naive_apply(st, m), depth - 1);
    return n;
}

std::vector<GameState> tiny_corpus(std::uint64_t seed, int n, int max_side) {
    std::mt19937_64 rng(seed);
    tafl::testing::RandomSpec spec;
    spec.max_side = max_side;
    std::vector<GameState> out;
    while (static_cast<int>(out.size()) < n) out.push_back(tafl::testing::random_position(rng, spec));
    return out;
}

}  // namespace

TEST(Solver, BrandubhAttackerWinsInFivePlies) {
    const Outcome o = solve(brandubh(), {5, std::nullopt, std::nullopt});
    EXPECT_EQ(o.verdict, Verdict::AttackerWin);
    ASSERT_TRUE(o.plies);
    EXPECT_EQ(*o.plies, 5);
    EXPECT_EQ(o.line, line({"b4-b7", "c4-c7", "a4-c4", "e4-e7", "f4-e4"}));
}

TEST(Solver, BrandubhHasNoShorterWin) {
    const Outcome o = solve(brandubh(), {4, std::nullopt, std::nullopt});
    EXPECT_NE(o.verdict, Verdict::AttackerWin);
    EXPECT_NE(o.verdict, Verdict::DefenderWin);
}

TEST(Solver, BrandubhLineMatchesTheFigureFrames) {
    GameState st = brandubh();
    const auto pv = line({"b4-b7", "c4-c7", "a4-c4", "e4-e7", "f4-e4"});
    for (std::size_t i = 0; i < pv.size(); ++i) {
        if (st.to_move() == Side::Defender) {
            // Exhaustive check: every pseudo-legal move, keep those that capture or end the game.
            std::vector<Move> forcing;
            for (const Move& m : naive::moves(st))
                if (!naive::captures(st, m).empty() || naive::ends_game(st, m, naive::captures(st, m)))
                    forcing.push_back(m);
            ASSERT_EQ(forcing.size(), 1u) << "ply " << i + 1;
            EXPECT_EQ(forcing[0], pv[i]);
            EXPECT_EQ(legal_moves(st), forcing);
        }
        st = apply_move(st, pv[i]).first;
        if (i == 1) EXPECT_EQ(rows_of(st), kAfterPly2);
        if (i == 3) EXPECT_EQ(rows_of(st), kAfterPly4);
    }
    EXPECT_EQ(terminal_status(st), Terminal::AttackerWin);
    EXPECT_FALSE(st.king());
}

TEST(Solver, MemoTableDoesNotChangeResults) {
    for (const GameState& st : tiny_corpus(3, 60, 5)) {
        const Outcome with = solve(st, {4, std::nullopt, std::nullopt});
        const Outcome without = solve(st, {4, std::nullopt, 0});
        ASSERT_EQ(with.verdict, without.verdict) << emit_fen(st);
        ASSERT_EQ(with.plies, without.plies) << emit_fen(st);
        ASSERT_EQ(with.line, without.line) << emit_fen(st);
    }
    const Outcome a = solve(brandubh(), {5, std::nullopt, 0});
    EXPECT_EQ(a.verdict, Verdict::AttackerWin);
    EXPECT_EQ(a.plies, 5);
}

TEST(Solver, MatchesNaiveMinimaxOnTinyPositions) {
    int decided = 0;
    for (const GameState& st : tiny_corpus(11, 300, 5)) {
        for (int depth = 1; depth <= 3; ++depth) {
            const Value want = naive_value(st, depth);
            const Outcome got = solve(st, {depth, std::nullopt, std::nullopt});
            ASSERT_EQ(got.verdict, want.verdict) << emit_fen(st) << " depth " << depth;
            if (want.verdict != Verdict::Unknown) {
                ASSERT_EQ(got.plies, want.plies) << emit_fen(st) << " depth " << depth;
                ++decided;
            }
        }
    }
    EXPECT_GT(decided, 100);
}

TEST(Solver, ProvenResultsAreStableUnderDeeperHorizons) {
    for (const GameState& st : tiny_corpus(23, 40, 5)) {
        std::optional<Outcome> first;
        for (int depth = 1; depth <= 5; ++depth) {
            const Outcome o = solve(st, {depth, std::nullopt, std::nullopt});
            if (first) {
                ASSERT_EQ(o.verdict, first->verdict) << emit_fen(st) << " depth " << depth;
                ASSERT_EQ(o.plies, first->plies) << emit_fen(st) << " depth " << depth;
            } else if (o.verdict == Verdict::AttackerWin || o.verdict == Verdict::DefenderWin) {
                first = o;
            }
        }
    }
}

TEST(Solver, WinningLinesReplayToTheClaimedResult) {
    for (const GameState& st : tiny_corpus(29, 80, 6)) {
        const Outcome o = solve(st, {4, std::nullopt, std::nullopt});
        if (o.verdict != Verdict::AttackerWin && o.verdict != Verdict::DefenderWin) continue;
        ASSERT_EQ(static_cast<int>(o.line.size()), *o.plies) << emit_fen(st);
        GameState cur = st;
        for (const Move& m : o.line) {
            ASSERT_EQ(check_move(cur, m), std::nullopt) << emit_fen(st);
            cur = apply_move(cur, m).first;
        }
        EXPECT_EQ(terminal_status(cur), o.verdict == Verdict::AttackerWin ? Terminal::AttackerWin : Terminal::DefenderWin);
    }
}

TEST(Solver, ParallelEqualsSerial) {
    for (const GameState& st : tiny_corpus(31, 40, 6)) {
        const SearchLimits limits{4, std::nullopt, std::nullopt};
        const Outcome a = solve(st, limits);
        const Outcome b = solve_parallel(st, limits);
        ASSERT_EQ(a.verdict, b.verdict) << emit_fen(st);
        ASSERT_EQ(a.plies, b.plies) << emit_fen(st);
        ASSERT_EQ(a.line, b.line) << emit_fen(st);
    }
    const Outcome p = solve_parallel(brandubh(), {5, std::nullopt, std::nullopt});
    EXPECT_EQ(p.line, line({"b4-b7", "c4-c7", "a4-c4", "e4-e7", "f4-e4"}));
}

TEST(Solver, NodeBudgetGivesUnknown) {
    const Outcome o = solve(brandubh(), {5, 100, std::nullopt});
    EXPECT_TRUE(o.budget_exceeded);
    EXPECT_EQ(o.verdict, Verdict::Unknown);
    EXPECT_THROW(solve(brandubh(), {0, std::nullopt, std::nullopt}), std::invalid_argument);
}

TEST(Solver, RepetitionIsADraw) {
    // Two pieces on a 2x2 board: no anvil exists and each always has a free neighbour.
    const GameState st = parse_fen("2x2 1K/p1 a - -");
    const Outcome o = solve(st, {8, std::nullopt, std::nullopt});
    EXPECT_EQ(o.verdict, Verdict::Draw);
}

TEST(Solver, BestLineAndMoveValues) {
    const auto pv = best_line(brandubh(), {5, std::nullopt, std::nullopt});
    EXPECT_EQ(pv.size(), 5u);
    EXPECT_THROW(best_line(brandubh(), {3, std::nullopt, std::nullopt}), NoProvenWin);
    const auto values = evaluate_moves(brandubh(), {5, std::nullopt, std::nullopt});
    EXPECT_EQ(values.size(), legal_moves(brandubh()).size());
    int winning = 0;
    for (const auto& v : values)
        if (v.verdict == Verdict::AttackerWin) {
            ++winning;
            EXPECT_GE(*v.plies, 5);
        }
    EXPECT_GE(winning, 1);
    std::vector<Move> order;
    for (const auto& v : values) order.push_back(v.move);
    EXPECT_EQ(order, legal_moves(brandubh()));
    EXPECT_EQ(order.front(), parse_move("a4-a6"));
}

TEST(Perft, BrandubhMatchesTheNaiveTree) {
    const GameState st = brandubh();
    for (int d = 1; d <= 3; ++d) EXPECT_EQ(perft(st, d), naive_perft(st, d)) << d;
    EXPECT_EQ(perft(st, 1), legal_moves(st).size());
}

TEST(Perft, RandomPositionsMatchTheNaiveTree) {
    for (const GameState& st : tiny_corpus(41, 100, 7)) {
        ASSERT_EQ(perft(st, 3), naive_perft(st, 3)) << emit_fen(st);
    }
}

TEST(Perft, ParallelEqualsSerial) {
    EXPECT_EQ(perft_parallel(brandubh(), 4), perft(brandubh(), 4));
    for (const GameState& st : tiny_corpus(43, 20, 7)) ASSERT_EQ(perft_parallel(st, 3), perft(st, 3));
}
