#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tafl/core.hpp"
#include "tafl/solver.hpp"

namespace tafl::gadgets {

struct Dir {
    int dc = 0;
    int dr = 0;
    bool operator==(const Dir&) const = default;
};

inline constexpr Dir kUp{0, 1};
inline constexpr Dir kDown{0, -1};
inline constexpr Dir kRight{1, 0};
inline constexpr Dir kLeft{-1, 0};

std::string dir_name(Dir d);

enum class Axis { Row, Column };

struct Port {
    std::string name;
    bool inbound = true;
    // Inbound: where the activating soldier lands. Outbound: the square of the
    // soldier that leaves the gadget.
    Square entry;
    Dir direction;  // direction of travel through the port

    Axis axis() const { return direction.dc == 0 ? Axis::Column : Axis::Row; }
    int index() const { return axis() == Axis::Column ? entry.col : entry.row; }
};

struct PlacedPiece {
    Square square;
    Cell cell;
    bool operator==(const PlacedPiece&) const = default;
};

struct GadgetTemplate {
    std::string name;
    int width = 0;
    int height = 0;
    std::vector<PlacedPiece> pieces;
    std::vector<Port> ports;
    std::optional<Square> haven;  // required haven square, at a corner of the box

    const Port& port(const std::string& name) const;
};

// Orthogonal map (x, y) -> (a x + b y + dx, c x + d y + dy).
struct Transform {
    int a = 1, b = 0, c = 0, d = 1;
    int dx = 0, dy = 0;

    static Transform identity() { return {}; }
    static Transform translation(int dx, int dy) { return {1, 0, 0, 1, dx, dy}; }
    // One of identity, rot90, rot180, rot270, flip_h, flip_v, transpose,
    // antitranspose; rotations are counter-clockwise.
    static Transform named(const std::string& name);
    // Orientation `name` of a w x h box, translated so the image of the box
    // starts at (dx, dy).
    static Transform fit(const std::string& name, int w, int h, int dx = 0, int dy = 0);
    static const std::vector<std::string>& orientation_names();

    Square apply(Square s) const { return {a * s.col + b * s.row + dx, c * s.col + d * s.row + dy}; }
    Dir apply(Dir v) const { return {a * v.dc + b * v.dr, c * v.dc + d * v.dr}; }
    Move apply(const Move& m) const { return {apply(m.from), apply(m.to)}; }
    // this ∘ other
    Transform compose(const Transform& other) const;
    bool swaps_axes() const { return a == 0; }
    std::string name() const;  // orientation name plus offset
    bool operator==(const Transform&) const = default;
};

class OverlapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class AnchorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Cell swap_color(Cell c);

struct Instance {
    std::string template_name;
    Transform transform;
    bool colors_swapped = false;
    std::vector<PlacedPiece> pieces;
    std::vector<Port> ports;
    Square box_min;
    Square box_max;

    const Port& port(const std::string& name) const;
    bool contains(Square s) const {
        return s.col >= box_min.col && s.col <= box_max.col && s.row >= box_min.row &&
               s.row <= box_max.row;
    }
};

// Places the template's pieces on `board`. Throws OverlapError when a target
// square is off the board, occupied, a throne or a haven; AnchorError when the
// template's haven does not land on a haven of the board. Color swapping
// exchanges soldier colors; templates holding a King cannot be swapped.
Instance instantiate(const GadgetTemplate& t, const Transform& tf, GameState& board,
                     bool swap_colors = false);

// Bounding box the template would occupy under `tf`.
std::pair<Square, Square> transformed_box(const GadgetTemplate& t, const Transform& tf);

// Squares from `from` to `to` inclusive; the two must share a row or column.
struct Lane {
    Square from;
    Square to;
    std::vector<Square> squares() const;
    bool operator==(const Lane&) const = default;
};

struct ScriptedPly {
    Side mover;
    std::vector<Move> expected;     // exact forced set; empty with pass=true
    std::optional<Move> chosen;     // unset for a pass
    bool pass = false;              // mover plays elsewhere: must have no forcing move
    // Forced alternatives the engine finds that the figure and its prose do
    // not name. Kept apart from `expected` so reports can tell them apart.
    std::vector<Move> unlisted;
};

struct SolverClaim {
    int max_plies;
    Verdict verdict;
};

struct Postcondition {
    std::vector<Lane> clear;                        // every square empty
    std::vector<Lane> blocked;                      // some square occupied
    std::vector<std::pair<Side, Lane>> no_entry;    // side has no move touching the lane
    std::vector<Side> quiet;                        // side has no capture or game-ending move
    std::optional<Terminal> terminal;
    std::optional<SolverClaim> solver;
};

struct InstanceSpec {
    std::string template_name;
    Transform transform;
    bool swap_colors = false;
};

struct GadgetTrace {
    std::string name;
    std::string figure;
    std::string description;
    int width = 0;
    int height = 0;
    std::vector<Square> havens;
    std::vector<InstanceSpec> instances;
    std::vector<PlacedPiece> extras;  // soldiers waiting to activate an input
    Side first_mover = Side::Defender;
    std::vector<ScriptedPly> plies;   // plies[0] is the entry move
    Postcondition post;

    const ScriptedPly& entry() const { return plies.front(); }
};

struct PlyReport {
    int index = 0;
    Side mover = Side::Defender;
    std::vector<Move> expected;
    std::vector<Move> observed;
    std::vector<Move> unlisted;
    bool ok = true;
    std::string note;
};

struct TraceReport {
    std::string name;
    bool pass = true;
    std::vector<PlyReport> plies;
    std::optional<int> first_divergence;
    std::vector<std::string> failures;
    int unlisted = 0;  // declared alternatives met along the script
    std::string text() const;
};

struct Catalog {
    std::vector<GadgetTemplate> templates;
    std::vector<GadgetTrace> template_traces;  // main-text figures
    std::vector<GadgetTrace> appendix_traces;  // composite figures

    const GadgetTemplate& find_template(const std::string& name) const;
    const GadgetTrace* find_trace(const std::string& name) const;
};

const Catalog& catalog();
const GadgetTemplate& find_template(const std::string& name);

// Composite starting position of a trace, with its instances.
GameState build_position(const GadgetTrace& trace, std::vector<Instance>* instances = nullptr);

TraceReport verify_trace(const GadgetTrace& trace);

// Maps the whole trace through `tf`; the new board is the image of the old
// one, enlarged to start at the origin.
GadgetTrace transform_trace(const GadgetTrace& trace, const Transform& tf);

// Coordinate-list serialization.
std::string template_text(const GadgetTemplate& t);
std::string trace_text(const GadgetTrace& t);

}  // namespace tafl::gadgets
