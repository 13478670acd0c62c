#include "tafl/core.hpp"

#include <algorithm>

namespace tafl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Keys for small boards are tabulated; larger compiled boards fall back to
// hashing the index directly, which yields the same values.
struct KeyTable {
    static constexpr int kCells = 32 * 32;
    std::vector<std::uint64_t> keys;
    KeyTable() : keys(kCells * 4) {
        for (int i = 0; i < kCells * 4; ++i) keys[i] = splitmix64(0x7afe1000ULL + i);
    }
};

const KeyTable& key_table() {
    static const KeyTable t;
    return t;
}

}  // namespace

std::uint64_t zobrist_key(int idx, Cell c) {
    const int k = idx * 4 + static_cast<int>(c);
    if (idx < KeyTable::kCells) return key_table().keys[k];
    return splitmix64(0x7afe1000ULL + k);
}

std::uint64_t zobrist_mover_key() { return 0x2545f4914f6cdd1dULL; }
std::uint64_t zobrist_throne_flag_key() { return 0x9c8d5a1e0f3b7761ULL; }

Cell cell_of(Piece p) {
    if (p.kind == PieceKind::King) return Cell::King;
    return p.owner == Side::Attacker ? Cell::AttackerSoldier : Cell::DefenderSoldier;
}

std::optional<Piece> piece_of(Cell c) {
    switch (c) {
        case Cell::AttackerSoldier: return Piece{Side::Attacker, PieceKind::Soldier};
        case Cell::DefenderSoldier: return Piece{Side::Defender, PieceKind::Soldier};
        case Cell::King: return Piece{Side::Defender, PieceKind::King};
        case Cell::Empty: break;
    }
    return std::nullopt;
}

BoardGeometry::BoardGeometry(int width, int height, std::optional<Square> throne,
                             std::vector<Square> havens)
    : width_(width), height_(height), throne_(throne), havens_(std::move(havens)) {
    if (width <= 0 || height <= 0) throw GeometryError("board dimensions must be positive");
    if (width > kMaxBoardWidth) throw GeometryError("boards wider than " + std::to_string(kMaxBoardWidth) + " columns cannot be named");
    haven_mask_.assign(static_cast<std::size_t>(width) * height, 0);
    if (throne_) {
        if (!on_board(*throne_)) throw GeometryError("throne off the board");
        throne_idx_ = index(*throne_);
    }
    std::sort(havens_.begin(), havens_.end(), [](const Square& a, const Square& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    for (const Square& h : havens_) {
        if (!on_board(h)) throw GeometryError("haven off the board");
        if (haven_mask_[index(h)]) throw GeometryError("duplicate haven");
        if (throne_ && h == *throne_) throw GeometryError("haven coincides with throne");
        haven_mask_[index(h)] = 1;
    }
}

BoardGeometry BoardGeometry::standard(int side) {
    const int n = (side - 1) / 2;
    if (side < 3 || side % 2 == 0 || n % 2 == 0)
        throw GeometryError("standard board side must be 2n+1 with n odd");
    const int m = side - 1;
    return BoardGeometry(side, side, Square{n, n},
                         {Square{0, 0}, Square{0, m}, Square{m, 0}, Square{m, m}});
}

GameState::GameState(BoardGeometry geometry, RuleConfig config, Side to_move, bool fragment_mode)
    : geometry_(std::make_shared<const BoardGeometry>(std::move(geometry))),
      config_(config),
      cells_(static_cast<std::size_t>(geometry_->cell_count()), Cell::Empty),
      to_move_(to_move),
      fragment_mode_(fragment_mode) {
    hash_ = to_move_ == Side::Defender ? zobrist_mover_key() : 0;
    history_.assign(1, hash_);
}

std::optional<Square> GameState::king() const {
    if (king_idx_ < 0) return std::nullopt;
    return geometry_->square(king_idx_);
}

int GameState::repetitions() const {
    return static_cast<int>(std::count(history_.begin(), history_.end(), hash_));
}

void GameState::set_cell(int idx, Cell c) {
    const Cell old = cells_[idx];
    if (old == c) return;
    if (old != Cell::Empty) {
        hash_ ^= zobrist_key(idx, old);
        if (old == Cell::AttackerSoldier) --attackers_;
        else --defenders_;
        if (old == Cell::King) king_idx_ = -1;
    }
    if (c != Cell::Empty) {
        hash_ ^= zobrist_key(idx, c);
        if (c == Cell::AttackerSoldier) ++attackers_;
        else ++defenders_;
        if (c == Cell::King) king_idx_ = idx;
    }
    cells_[idx] = c;
}

void GameState::place(Square s, Piece p) {
    if (!geometry_->on_board(s)) throw GeometryError("square off the board");
    const Cell c = cell_of(p);
    if (c == Cell::King && king_idx_ >= 0 && king_idx_ != geometry_->index(s))
        throw GeometryError("a board holds at most one King");
    set_cell(geometry_->index(s), c);
    reset_history();
}

void GameState::remove(Square s) {
    if (!geometry_->on_board(s)) throw GeometryError("square off the board");
    set_cell(geometry_->index(s), Cell::Empty);
    reset_history();
}

void GameState::set_to_move(Side s) {
    if (s != to_move_) hash_ ^= zobrist_mover_key();
    to_move_ = s;
    reset_history();
}

void GameState::set_king_left_throne(bool on) {
    if (on != king_left_throne_) hash_ ^= zobrist_throne_flag_key();
    king_left_throne_ = on;
    reset_history();
}

bool GameState::operator==(const GameState& o) const {
    return *geometry_ == *o.geometry_ && config_ == o.config_ && cells_ == o.cells_ &&
           to_move_ == o.to_move_ && fragment_mode_ == o.fragment_mode_ &&
           king_left_throne_ == o.king_left_throne_;
}

}  // namespace tafl
