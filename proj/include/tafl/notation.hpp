#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "tafl/core.hpp"

namespace tafl {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& msg);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

std::string column_name(int col);
std::string square_name(Square s);
Square parse_square(std::string_view text);  // throws ParseError

std::string move_name(const Move& m);        // "b4-b7"
Move parse_move(std::string_view text);      // accepts "b4-b7" and "b4b7"

const char* side_name(Side s);               // "attacker" / "defender"
const char* terminal_name(Terminal t);       // "none" / "defender-win" / "attacker-win"

// <W>x<H> <rows> <mover> <throne> <havens> [flags]
// Flags: F forces fragment mode on a board with a King, N forces it off on a
// kingless board, T records that the King has left the throne.
GameState parse_fen(std::string_view text, const RuleConfig& config = {});
std::string emit_fen(const GameState& state);

// The Brandubh opening position under the given config.
GameState brandubh(const RuleConfig& config = {});

// Human-readable board diagram, row 1 at the bottom.
std::string render_board(const GameState& state);

}  // namespace tafl
