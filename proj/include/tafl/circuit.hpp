#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tafl/core.hpp"
#include "tafl/notation.hpp"

namespace tafl {

enum class NodeKind { Variable, Fanout, Choice, And, Or, Victory };

const char* node_kind_name(NodeKind k);

struct CircuitNode {
    std::string id;
    NodeKind kind = NodeKind::Variable;
    Side victory_side = Side::Defender;  // only meaningful for Victory
};

struct CircuitEdge {
    std::string from;
    std::string from_port;
    std::string to;
    std::string to_port;
    std::string key() const { return from + "." + from_port + "->" + to + "." + to_port; }
};

class ArityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class CycleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class MultipleVictoryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Port names: variable {out}; fanout, choice {in, out0, out1}; and, or
// {in0, in1, out}; victory {in}. For choice, out0 continues upward and out1
// turns right; for fanout, out0 is the sideways exit and out1 the straight one.
const std::vector<std::string>& input_ports(NodeKind k);
const std::vector<std::string>& output_ports(NodeKind k);

class CircuitGraph {
public:
    std::vector<CircuitNode> nodes;
    std::vector<CircuitEdge> edges;

    const CircuitNode* find(const std::string& id) const;
    const CircuitNode* victory() const;
    // Every input connected exactly once, every output at most once, at most
    // one victory node, no cycles.
    void validate() const;
    // Node ids with every edge source ahead of its target; ties in file order.
    std::vector<std::string> topological_order() const;
    std::vector<const CircuitEdge*> inputs_of(const std::string& id) const;
    std::vector<const CircuitEdge*> outputs_of(const std::string& id) const;
};

// Line format:
//   node <id> <variable|fanout|choice|and|or|victory> [defender|attacker]
//   edge <id>.<port> -> <id>.<port>
// '#' starts a comment. Throws ParseError for malformed lines and the
// validation errors above.
CircuitGraph parse_circuit(std::string_view text);
std::string emit_circuit(const CircuitGraph& g);

}  // namespace tafl
