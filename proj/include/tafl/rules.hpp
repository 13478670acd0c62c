#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tafl/core.hpp"

namespace tafl {

enum class MoveError {
    NoPiece,
    NotYourPiece,
    OffBoard,
    NotStraight,
    PathBlocked,
    ThroneRestricted,
    HavenRestricted,
    NotForced,
    GameOver,
};

const char* reason_code(MoveError e);

class IllegalMove : public std::runtime_error {
public:
    IllegalMove(MoveError reason, const std::string& what)
        : std::runtime_error(what), reason_(reason) {}
    MoveError reason() const { return reason_; }

private:
    MoveError reason_;
};

// A move paired with its outcome, as produced during generation.
struct ScoredMove {
    Move move;
    MoveResult result;
};

// All moves of the side to move, ignoring the forced filter. Empty when the
// position is already decided.
std::vector<Move> pseudo_legal_moves(const GameState& state);

// Moves with their capture sets and terminal effects, forced filter applied
// when the config enables it.
std::vector<ScoredMove> scored_legal_moves(const GameState& state);

std::vector<Move> legal_moves(const GameState& state);

// True when the forced filter is restricting the mover in this position.
bool forced_active(const GameState& state);

// Capture set of a pseudo-legal move. Throws IllegalMove when the move is not
// pseudo-legal.
std::vector<Square> captures_of(const GameState& state, const Move& move);

// Reason the move is illegal, or nullopt when it is legal (filter included).
std::optional<MoveError> check_move(const GameState& state, const Move& move);

std::pair<GameState, MoveResult> apply_move(const GameState& state, const Move& move);

// Position-based outcome only: haven/edge arrival, King absence, attacker
// extinction. Does not look at mobility.
Terminal static_terminal(const GameState& state);

Terminal terminal_status(const GameState& state);

// Used by the solver and generators: no legality checks, result precomputed.
GameState apply_unchecked(const GameState& state, const Move& move, const MoveResult& result);

}  // namespace tafl
