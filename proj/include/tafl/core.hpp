#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tafl {

enum class Side : std::uint8_t { Attacker, Defender };
enum class PieceKind : std::uint8_t { Soldier, King };

// Columns are named a..z, then aa..zz.
inline constexpr int kMaxBoardWidth = 26 * 27;

inline Side opponent(Side s) { return s == Side::Attacker ? Side::Defender : Side::Attacker; }

struct Piece {
    Side owner = Side::Attacker;
    PieceKind kind = PieceKind::Soldier;
    bool operator==(const Piece&) const = default;
};

// Dense board cell encoding. The numeric values are used as hash key indices.
enum class Cell : std::uint8_t { Empty = 0, AttackerSoldier = 1, DefenderSoldier = 2, King = 3 };

Cell cell_of(Piece p);
std::optional<Piece> piece_of(Cell c);
inline bool is_attacker(Cell c) { return c == Cell::AttackerSoldier; }
inline bool is_defender(Cell c) { return c == Cell::DefenderSoldier || c == Cell::King; }
inline bool owned_by(Cell c, Side s) {
    return s == Side::Attacker ? is_attacker(c) : is_defender(c);
}

struct Square {
    int col = 0;
    int row = 0;
    bool operator==(const Square&) const = default;
    // Column-major order, rows descending within a column. This is the order
    // moves are enumerated and tie-broken in; see Move::operator<.
    bool operator<(const Square& o) const {
        if (col != o.col) return col < o.col;
        return row > o.row;
    }
};

struct Move {
    Square from;
    Square to;
    bool operator==(const Move&) const = default;
    bool operator<(const Move& o) const {
        if (!(from == o.from)) return from < o.from;
        return to < o.to;
    }
};

enum class Terminal : std::uint8_t { None, DefenderWin, AttackerWin };

struct MoveResult {
    std::vector<Square> captures;  // sorted by Square order
    Terminal terminal = Terminal::None;
};

enum class KingCapturePower : std::uint8_t { Full, NoHammer, NoParticipation };
enum class KingCaptureMode : std::uint8_t { HammerAnvil, TrapOnly, TrapNoEdges };
enum class ThroneAccess : std::uint8_t {
    KingOnly,
    KingThroughOnceOnly,
    DefendersThroughOnly,
    AllThroughOnly,
    DefendersThroughAndStop,
    AllNormal,
    KingThroughNotBack,
};

struct RuleConfig {
    bool forced_capture = true;
    bool traps = false;
    bool king_protected_on_throne = false;
    bool throne_is_anvil = false;
    KingCapturePower king_capture_power = KingCapturePower::Full;
    ThroneAccess throne_access = ThroneAccess::KingOnly;
    KingCaptureMode king_capture_mode = KingCaptureMode::HammerAnvil;
    bool edge_escape = false;
    Side first_mover = Side::Attacker;
    bool operator==(const RuleConfig&) const = default;
};

class BoardGeometry {
public:
    BoardGeometry(int width, int height, std::optional<Square> throne = std::nullopt,
                  std::vector<Square> havens = {});

    // (2n+1)x(2n+1) with n odd, throne at the centre, havens in the corners.
    static BoardGeometry standard(int side);

    int width() const { return width_; }
    int height() const { return height_; }
    int cell_count() const { return width_ * height_; }
    bool on_board(int col, int row) const {
        return col >= 0 && row >= 0 && col < width_ && row < height_;
    }
    bool on_board(Square s) const { return on_board(s.col, s.row); }
    int index(Square s) const { return s.row * width_ + s.col; }
    Square square(int idx) const { return {idx % width_, idx / width_}; }

    const std::optional<Square>& throne() const { return throne_; }
    const std::vector<Square>& havens() const { return havens_; }
    bool is_throne(int idx) const { return throne_idx_ == idx; }
    bool is_haven(int idx) const { return haven_mask_[idx] != 0; }
    bool is_throne(Square s) const { return is_throne(index(s)); }
    bool is_haven(Square s) const { return is_haven(index(s)); }
    bool on_edge(Square s) const {
        return s.col == 0 || s.row == 0 || s.col == width_ - 1 || s.row == height_ - 1;
    }

    bool operator==(const BoardGeometry& o) const {
        return width_ == o.width_ && height_ == o.height_ && throne_ == o.throne_ &&
               havens_ == o.havens_;
    }

private:
    int width_;
    int height_;
    std::optional<Square> throne_;
    std::vector<Square> havens_;
    int throne_idx_ = -1;
    std::vector<std::uint8_t> haven_mask_;
};

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class GameState {
public:
    GameState(BoardGeometry geometry, RuleConfig config, Side to_move, bool fragment_mode);

    const BoardGeometry& geometry() const { return *geometry_; }
    const std::shared_ptr<const BoardGeometry>& geometry_ptr() const { return geometry_; }
    const RuleConfig& config() const { return config_; }
    Side to_move() const { return to_move_; }
    bool fragment_mode() const { return fragment_mode_; }
    bool king_left_throne() const { return king_left_throne_; }
    std::uint64_t hash() const { return hash_; }
    const std::vector<std::uint64_t>& history() const { return history_; }

    Cell at(Square s) const { return cells_[geometry_->index(s)]; }
    Cell at(int idx) const { return cells_[idx]; }
    std::optional<Piece> piece_at(Square s) const { return piece_of(at(s)); }
    const std::vector<Cell>& cells() const { return cells_; }

    std::optional<Square> king() const;
    int count(Side s) const { return s == Side::Attacker ? attackers_ : defenders_; }
    int repetitions() const;

    // Construction helpers. They keep the hash consistent and reset history to
    // the single current position.
    void place(Square s, Piece p);
    void remove(Square s);
    void set_to_move(Side s);
    void set_fragment_mode(bool on) { fragment_mode_ = on; }
    void set_king_left_throne(bool on);
    void set_config(const RuleConfig& c) { config_ = c; }
    void reset_history() { history_.assign(1, hash_); }

    // Position equality: geometry, placement, mover, config and flags. History
    // is not compared.
    bool operator==(const GameState& o) const;

private:
    friend GameState apply_unchecked(const GameState&, const Move&, const MoveResult&);
    void set_cell(int idx, Cell c);

    std::shared_ptr<const BoardGeometry> geometry_;
    RuleConfig config_;
    std::vector<Cell> cells_;
    Side to_move_;
    bool fragment_mode_;
    bool king_left_throne_ = false;
    int attackers_ = 0;
    int defenders_ = 0;
    int king_idx_ = -1;
    std::uint64_t hash_ = 0;
    std::vector<std::uint64_t> history_;
};

std::uint64_t zobrist_key(int idx, Cell c);
std::uint64_t zobrist_mover_key();
std::uint64_t zobrist_throne_flag_key();

}  // namespace tafl
