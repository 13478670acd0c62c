#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tafl/core.hpp"

namespace tafl {

enum class Verdict : std::uint8_t { AttackerWin, DefenderWin, Draw, Unknown };

const char* verdict_name(Verdict v);

struct Outcome {
    Verdict verdict = Verdict::Unknown;
    std::optional<int> plies;   // set iff verdict is a win
    std::vector<Move> line;     // principal variation when a win is proven
    std::uint64_t nodes = 0;
    bool budget_exceeded = false;
};

struct SearchLimits {
    int max_plies = 1;
    std::optional<std::uint64_t> node_budget;
    // Entries in the memo table; 0 disables it. Unset means the default size.
    std::optional<std::size_t> table_capacity;
};

class NoProvenWin : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exhaustive depth-bounded minimax over forced-filtered moves. A position that
// repeats (with the same mover) on the current path scores as a draw.
Outcome solve(const GameState& state, const SearchLimits& limits);

// Root moves are searched in parallel with OpenMP; the result is merged in
// canonical move order and equals solve() exactly.
Outcome solve_parallel(const GameState& state, const SearchLimits& limits);

// Fastest win for the winner, longest resistance for the loser; ties go to the
// first move in canonical order. Throws NoProvenWin.
std::vector<Move> best_line(const GameState& state, const SearchLimits& limits);

// Value of every legal move from the mover's perspective, in canonical order.
struct MoveValue {
    Move move;
    Verdict verdict;
    std::optional<int> plies;  // plies to the result counted from `state`
};
std::vector<MoveValue> evaluate_moves(const GameState& state, const SearchLimits& limits);

std::uint64_t perft(const GameState& state, int depth);
std::uint64_t perft_parallel(const GameState& state, int depth);

}  // namespace tafl
