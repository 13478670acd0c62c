#include "tafl/circuit.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tafl {

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Variable: return "variable";
        case NodeKind::Fanout: return "fanout";
        case NodeKind::Choice: return "choice";
        case NodeKind::And: return "and";
        case NodeKind::Or: return "or";
        case NodeKind::Victory: return "victory";
    }
    return "?";
}

const std::vector<std::string>& input_ports(NodeKind k) {
    static const std::vector<std::string> none, one{"in"}, two{"in0", "in1"};
    switch (k) {
        case NodeKind::Variable: return none;
        case NodeKind::Fanout:
        case NodeKind::Choice:
        case NodeKind::Victory: return one;
        case NodeKind::And:
        case NodeKind::Or: return two;
    }
    return none;
}

const std::vector<std::string>& output_ports(NodeKind k) {
    static const std::vector<std::string> none, one{"out"}, two{"out0", "out1"};
    switch (k) {
        case NodeKind::Variable:
        case NodeKind::And:
        case NodeKind::Or: return one;
        case NodeKind::Fanout:
        case NodeKind::Choice: return two;
        case NodeKind::Victory: return none;
    }
    return none;
}

const CircuitNode* CircuitGraph::find(const std::string& id) const {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

const CircuitNode* CircuitGraph::victory() const {
    for (const auto& n : nodes)
        if (n.kind == NodeKind::Victory) return &n;
    return nullptr;
}

std::vector<const CircuitEdge*> CircuitGraph::inputs_of(const std::string& id) const {
    std::vector<const CircuitEdge*> out;
    for (const auto& e : edges)
        if (e.to == id) out.push_back(&e);
    return out;
}

std::vector<const CircuitEdge*> CircuitGraph::outputs_of(const std::string& id) const {
    std::vector<const CircuitEdge*> out;
    for (const auto& e : edges)
        if (e.from == id) out.push_back(&e);
    return out;
}

void CircuitGraph::validate() const {
    int victories = 0;
    std::set<std::string> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second) throw ArityError("duplicate node id " + n.id);
        victories += n.kind == NodeKind::Victory;
    }
    if (victories > 1) throw MultipleVictoryError("circuit has " + std::to_string(victories) + " victory nodes");

    std::map<std::pair<std::string, std::string>, int> in_use, out_use;
    for (const auto& e : edges) {
        const CircuitNode* a = find(e.from);
        const CircuitNode* b = find(e.to);
        if (!a) throw ArityError("edge from unknown node " + e.from);
        if (!b) throw ArityError("edge to unknown node " + e.to);
        const auto& outs = output_ports(a->kind);
        const auto& ins = input_ports(b->kind);
        if (std::find(outs.begin(), outs.end(), e.from_port) == outs.end())
            throw ArityError(std::string(node_kind_name(a->kind)) + " " + a->id + " has no output port " + e.from_port);
        if (std::find(ins.begin(), ins.end(), e.to_port) == ins.end())
            throw ArityError(std::string(node_kind_name(b->kind)) + " " + b->id + " has no input port " + e.to_port);
        if (++out_use[{e.from, e.from_port}] > 1)
            throw ArityError("output " + e.from + "." + e.from_port + " is connected twice");
        if (++in_use[{e.to, e.to_port}] > 1)
            throw ArityError("input " + e.to + "." + e.to_port + " is connected twice");
    }
    for (const auto& n : nodes)
        for (const auto& p : input_ports(n.kind))
            if (!in_use.count({n.id, p})) throw ArityError("input " + n.id + "." + p + " is not connected");
    topological_order();
}

std::vector<std::string> CircuitGraph::topological_order() const {
    std::map<std::string, int> indeg;
    for (const auto& n : nodes) indeg[n.id] = 0;
    for (const auto& e : edges) ++indeg[e.to];
    std::vector<std::string> order;
    std::vector<bool> done(nodes.size(), false);
    while (order.size() < nodes.size()) {
        bool progress = false;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (done[i] || indeg[nodes[i].id] != 0) continue;
            done[i] = true;
            progress = true;
            order.push_back(nodes[i].id);
            for (const auto& e : edges)
                if (e.from == nodes[i].id) --indeg[e.to];
            break;
        }
        if (!progress) {
            std::string stuck;
            for (std::size_t i = 0; i < nodes.size(); ++i)
                if (!done[i]) stuck += (stuck.empty() ? "" : ", ") + nodes[i].id;
            throw CycleError("circuit has a cycle through " + stuck);
        }
    }
    return order;
}

namespace {

bool parse_kind(const std::string& s, NodeKind& k) {
    static const std::pair<const char*, NodeKind> table[] = {
        {"variable", NodeKind::Variable}, {"fanout", NodeKind::Fanout}, {"choice", NodeKind::Choice},
        {"and", NodeKind::And},           {"or", NodeKind::Or},         {"victory", NodeKind::Victory},
    };
    for (const auto& [name, kind] : table)
        if (s == name) {
            k = kind;
            return true;
        }
    return false;
}

struct Tokens {
    std::vector<std::string> words;
    std::vector<int> columns;  // 1-based
};

Tokens split(const std::string& line) {
    Tokens t;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        t.words.push_back(line.substr(i, j - i));
        t.columns.push_back(static_cast<int>(i) + 1);
        i = j;
    }
    return t;
}

std::pair<std::string, std::string> endpoint(const std::string& w, int line, int col) {
    const auto dot = w.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == w.size())
        throw ParseError(line, col, "expected <node>.<port>, got '" + w + "'");
    return {w.substr(0, dot), w.substr(dot + 1)};
}

}  // namespace

CircuitGraph parse_circuit(std::string_view text) {
    CircuitGraph g;
    std::istringstream is{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const Tokens t = split(raw);
        if (t.words.empty()) continue;
        const std::string& head = t.words[0];
        if (head == "node") {
            if (t.words.size() < 3 || t.words.size() > 4)
                throw ParseError(line_no, t.columns[0], "expected: node <id> <kind> [defender|attacker]");
            CircuitNode n;
            n.id = t.words[1];
            if (n.id.find('.') != std::string::npos) throw ParseError(line_no, t.columns[1], "node id may not contain '.'");
            if (!parse_kind(t.words[2], n.kind))
                throw ParseError(line_no, t.columns[2], "unknown node kind '" + t.words[2] + "'");
            if (t.words.size() == 4) {
                if (n.kind != NodeKind::Victory)
                    throw ParseError(line_no, t.columns[3], "only victory nodes take a side");
                if (t.words[3] == "defender") n.victory_side = Side::Defender;
                else if (t.words[3] == "attacker") n.victory_side = Side::Attacker;
                else throw ParseError(line_no, t.columns[3], "side must be defender or attacker");
            }
            g.nodes.push_back(n);
        } else if (head == "edge") {
            if (t.words.size() != 4 || t.words[2] != "->")
                throw ParseError(line_no, t.columns[0], "expected: edge <id>.<port> -> <id>.<port>");
            CircuitEdge e;
            std::tie(e.from, e.from_port) = endpoint(t.words[1], line_no, t.columns[1]);
            std::tie(e.to, e.to_port) = endpoint(t.words[3], line_no, t.columns[3]);
            g.edges.push_back(e);
        } else {
            throw ParseError(line_no, t.columns[0], "unknown directive '" + head + "'");
        }
    }
    g.validate();
    return g;
}

std::string emit_circuit(const CircuitGraph& g) {
    std::ostringstream os;
    for (const auto& n : g.nodes) {
        os << "node " << n.id << ' ' << node_kind_name(n.kind);
        if (n.kind == NodeKind::Victory) os << ' ' << side_name(n.victory_side);
        os << '\n';
    }
    for (const auto& e : g.edges) os << "edge " << e.from << '.' << e.from_port << " -> " << e.to << '.' << e.to_port << '\n';
    return os.str();
}

}  // namespace tafl
