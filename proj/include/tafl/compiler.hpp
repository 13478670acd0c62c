#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tafl/circuit.hpp"
#include "tafl/core.hpp"
#include "tafl/gadgets.hpp"

namespace tafl {

class LayoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PlacedInstance {
    std::string label;  // "x1", "x1.out->g.in0#0", "g/conv" ...
    std::string node;   // owning circuit node, empty for routing wires
    std::string edge;   // owning edge key, empty for node parts
    gadgets::Instance inst;
};

// A designated soldier move from one instance's outbound port into another
// instance's inbound port. The lane is the open path strictly between the two
// squares.
struct Link {
    int from_instance = -1;  // -1: a free-standing entry soldier
    std::string from_port;
    int to_instance = -1;
    std::string to_port;
    Move move;
    std::vector<Square> lane() const;
};

struct Placement {
    int size = 0;                    // board side, 2n+1 with n odd
    int spacing = 0;
    Side true_side = Side::Defender; // player who wins iff the formula holds
    std::vector<PlacedInstance> instances;
    std::map<std::string, int> node_instance;           // node id -> main instance
    std::map<std::string, std::vector<int>> chains;     // edge key -> wire instances
    std::vector<Link> links;
    std::map<std::string, std::string> input_assignment;  // edge key -> gadget port used
    std::string dummy;               // id of the inserted dummy variable, if any

    bool connected(int a, int b) const;
    std::optional<int> owner(Square s) const;  // instance holding a piece at s initially
    std::string manifest() const;
};

struct Violation {
    std::string line;  // "row 4" / "column c"
    int a = -1;
    int b = -1;
    std::string description;
};

struct InterferenceReport {
    std::vector<Violation> violations;
    bool clean() const { return violations.empty(); }
    std::string text() const;
};

class InterferenceError : public std::runtime_error {
public:
    InterferenceError(InterferenceReport r);
    const InterferenceReport& report() const { return report_; }

private:
    InterferenceReport report_;
};

struct Compiled {
    GameState state;
    Placement placement;
};

// Lays the circuit out on a standard board: one macro cell per node along the
// main diagonal in topological order, every edge routed as an L through a
// corner wire, the victory gadget anchored at the top-right haven. `spacing`
// is the empty margin between neighbouring cells.
Compiled compile(const CircuitGraph& graph, int spacing = 2);

InterferenceReport check_interference(const GameState& state, const Placement& placement);

// Placement view of a catalog composite: one instance per template use, entry
// soldiers as free-standing links, links wherever an outbound port lines up
// with an inbound port of another instance.
Placement placement_of(const gadgets::GadgetTrace& trace);

struct StrategyChoices {
    std::vector<std::string> true_claims;   // variables the true player claims, in order
    std::vector<std::string> false_claims;  // defaults to the remaining ones in id order
    std::map<std::string, int> choice_out;  // choice node -> 0 (straight on) or 1 (turn)
};

struct SimulatedPly {
    Side mover;
    std::vector<Move> forced;
    Move played;
    std::string note;
};

struct SimulationReport {
    bool victory_activated = false;
    Terminal result = Terminal::None;
    std::optional<int> solver_plies;   // length of the solver-proven finish
    bool true_player_wins = false;
    int unscripted = 0;      // forcing options of the true player outside its plan
    int stale_captures = 0;  // false-player captures of pieces left behind by fired gadgets
    int refuted = 0;            // early King captures the solver shows lose at once
    int alternate_hammers = 0;  // false-player replies by another gadget's soldier, same captures
    std::vector<SimulatedPly> plies;
    std::string text() const;
};

class ScriptDiverged : public std::runtime_error {
public:
    ScriptDiverged(int ply, std::vector<Move> observed, std::vector<Move> expected, const std::string& what);
    int ply() const { return ply_; }
    const std::vector<Move>& observed() const { return observed_; }
    const std::vector<Move>& expected() const { return expected_; }

private:
    int ply_;
    std::vector<Move> observed_;
    std::vector<Move> expected_;
};

SimulationReport simulate_strategy(const GameState& state, const Placement& placement,
                                   const StrategyChoices& choices);

}  // namespace tafl
