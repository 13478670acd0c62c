#include "tafl/compiler.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "tafl/notation.hpp"
#include "tafl/rules.hpp"
#include "tafl/solver.hpp"

namespace tafl {

using gadgets::Dir;
using gadgets::Instance;
using gadgets::Port;
using gadgets::Transform;

std::vector<Square> Link::lane() const {
    std::vector<Square> out;
    const int dc = (move.to.col > move.from.col) - (move.to.col < move.from.col);
    const int dr = (move.to.row > move.from.row) - (move.to.row < move.from.row);
    for (Square s{move.from.col + dc, move.from.row + dr}; !(s == move.to); s = {s.col + dc, s.row + dr})
        out.push_back(s);
    return out;
}

bool Placement::connected(int a, int b) const {
    if (a == b) return true;
    for (const Link& l : links)
        if ((l.from_instance == a && l.to_instance == b) || (l.from_instance == b && l.to_instance == a))
            return true;
    return false;
}

std::optional<int> Placement::owner(Square s) const {
    for (std::size_t i = 0; i < instances.size(); ++i)
        for (const auto& p : instances[i].inst.pieces)
            if (p.square == s) return static_cast<int>(i);
    for (const Link& l : links)
        if (l.from_instance < 0 && l.move.from == s) return l.to_instance;
    return std::nullopt;
}

namespace {

std::string box_name(const Instance& in) { return square_name(in.box_min) + ":" + square_name(in.box_max); }

std::string line_name(Square a, Square b) {
    if (a.row == b.row) return "row " + std::to_string(a.row + 1);
    return "column " + column_name(a.col);
}

}  // namespace

std::string Placement::manifest() const {
    std::ostringstream os;
    os << "board " << size << 'x' << size << " true-side " << side_name(true_side) << " spacing " << spacing << '\n';
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& p = instances[i];
        os << "instance " << i << ' ' << p.label << ' ' << p.inst.template_name << ' ' << box_name(p.inst) << ' '
           << p.inst.transform.name() << (p.inst.colors_swapped ? " swapped" : "") << '\n';
    }
    for (const auto& [node, idx] : node_instance) os << "node " << node << " instance " << idx << '\n';
    for (const auto& [edge, wires] : chains) {
        os << "chain " << edge;
        for (int w : wires) os << ' ' << w;
        auto it = input_assignment.find(edge);
        if (it != input_assignment.end()) os << " port " << it->second;
        os << '\n';
    }
    for (const Link& l : links)
        os << "link " << l.from_instance << '.' << (l.from_port.empty() ? "entry" : l.from_port) << " -> "
           << l.to_instance << '.' << l.to_port << ' ' << move_name(l.move) << '\n';
    if (!dummy.empty()) os << "dummy " << dummy << '\n';
    return os.str();
}

std::string InterferenceReport::text() const {
    if (violations.empty()) return "clean\n";
    std::ostringstream os;
    for (const auto& v : violations)
        os << v.line << ": instances " << v.a << " and " << v.b << ": " << v.description << '\n';
    return os.str();
}

InterferenceError::InterferenceError(InterferenceReport r)
    : std::runtime_error("gadget interference:\n" + r.text()), report_(std::move(r)) {}

ScriptDiverged::ScriptDiverged(int ply, std::vector<Move> observed, std::vector<Move> expected,
                               const std::string& what)
    : std::runtime_error(what), ply_(ply), observed_(std::move(observed)), expected_(std::move(expected)) {}

// ---------------------------------------------------------------------------
// Interference

namespace {

bool boxes_overlap(const Instance& a, const Instance& b) {
    return a.box_min.col <= b.box_max.col && b.box_min.col <= a.box_max.col && a.box_min.row <= b.box_max.row &&
           b.box_min.row <= a.box_max.row;
}

bool is_link_move(const Placement& p, const Move& m) {
    for (const Link& l : p.links)
        if (l.move == m) return true;
    return false;
}

}  // namespace

InterferenceReport check_interference(const GameState& state, const Placement& placement) {
    InterferenceReport rep;
    const BoardGeometry& g = state.geometry();
    const int n = static_cast<int>(placement.instances.size());

    std::vector<int> owner(g.width() * g.height(), -1);
    for (int i = 0; i < n; ++i)
        for (const auto& p : placement.instances[i].inst.pieces) owner[g.index(p.square)] = i;
    for (const Link& l : placement.links)
        if (l.from_instance < 0) owner[g.index(l.move.from)] = l.to_instance;

    for (int i = 0; i < g.width() * g.height(); ++i)
        if (state.cells()[i] != Cell::Empty && owner[i] < 0) {
            const Square s = g.square(i);
            rep.violations.push_back({line_name(s, s), -1, -1, "piece on " + square_name(s) + " belongs to no gadget"});
        }

    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (!placement.connected(a, b) && boxes_overlap(placement.instances[a].inst, placement.instances[b].inst))
                rep.violations.push_back({"box", a, b, "bounding boxes overlap"});

    for (const Link& l : placement.links) {
        for (const Square& s : l.lane()) {
            if (!g.on_board(s) || g.is_throne(s) || g.is_haven(s)) {
                rep.violations.push_back({line_name(l.move.from, l.move.to), l.from_instance, l.to_instance,
                                          "lane " + move_name(l.move) + " crosses " + square_name(s) +
                                              ", which soldiers cannot enter"});
                continue;
            }
            const int o = owner[g.index(s)];
            if (o >= 0 && o != l.from_instance && o != l.to_instance)
                rep.violations.push_back({line_name(l.move.from, l.move.to), o, l.to_instance,
                                          "lane " + move_name(l.move) + " blocked at " + square_name(s)});
        }
    }

    // Any capture whose hammer, victim and anvil do not all belong to
    // mutually linked instances is an interaction no gadget script covers.
    for (Side side : {Side::Attacker, Side::Defender}) {
        GameState st = state;
        st.set_to_move(side);
        for (const Move& m : pseudo_legal_moves(st)) {
            if (is_link_move(placement, m)) continue;
            const int ha = owner[g.index(m.from)];
            for (const Square& t : captures_of(st, m)) {
                const int vb = owner[g.index(t)];
                const Square anvil{2 * t.col - m.to.col, 2 * t.row - m.to.row};
                const int ac = g.on_board(anvil) ? owner[g.index(anvil)] : -1;
                auto ok = [&](int x, int y) { return x < 0 || y < 0 || placement.connected(x, y); };
                if (ok(ha, vb) && ok(ha, ac) && ok(vb, ac)) continue;
                const int other = !ok(ha, vb) ? vb : ac;
                rep.violations.push_back({line_name(m.to, t), ha, other,
                                          std::string(side_name(side)) + " " + move_name(m) + " captures " +
                                              square_name(t) + " across gadgets"});
            }
        }
    }
    return rep;
}

Placement placement_of(const gadgets::GadgetTrace& trace) {
    Placement p;
    std::vector<Instance> inst;
    GameState st = gadgets::build_position(trace, &inst);
    p.size = std::max(trace.width, trace.height);
    p.true_side = trace.first_mover;
    for (std::size_t i = 0; i < inst.size(); ++i) {
        const auto& spec = trace.instances[i];
        p.instances.push_back({spec.template_name + "#" + std::to_string(i), "", "", inst[i]});
    }
    auto aligned = [](Square from, Dir d, Square to) {
        const int dc = to.col - from.col, dr = to.row - from.row;
        if (d.dc != 0) return dr == 0 && dc * d.dc > 0;
        return dc == 0 && dr * d.dr > 0;
    };
    for (std::size_t a = 0; a < inst.size(); ++a)
        for (const Port& out : inst[a].ports) {
            if (out.inbound) continue;
            for (std::size_t b = 0; b < inst.size(); ++b) {
                if (a == b) continue;
                for (const Port& in : inst[b].ports)
                    if (in.inbound && in.direction == out.direction && aligned(out.entry, out.direction, in.entry))
                        p.links.push_back({static_cast<int>(a), out.name, static_cast<int>(b), in.name,
                                           Move{out.entry, in.entry}});
            }
        }
    for (const auto& e : trace.extras)
        for (std::size_t b = 0; b < inst.size(); ++b)
            for (const Port& in : inst[b].ports)
                if (in.inbound && aligned(e.square, in.direction, in.entry))
                    p.links.push_back({-1, "", static_cast<int>(b), in.name, Move{e.square, in.entry}});
    return p;
}

// ---------------------------------------------------------------------------
// Layout

namespace {

Transform tf(const char* orient, int dx, int dy) {
    Transform t = Transform::named(orient);
    t.dx = dx;
    t.dy = dy;
    return t;
}

Transform shifted(Transform t, int dx, int dy) {
    t.dx += dx;
    t.dy += dy;
    return t;
}

struct PortRef {
    int part;
    std::string port;
};

struct Macro {
    std::string node;
    NodeKind kind = NodeKind::Variable;
    bool dummy = false;
    std::vector<std::pair<std::string, Transform>> parts;
    std::vector<std::pair<PortRef, PortRef>> internal;
    std::map<std::string, PortRef> ins;
    std::map<std::string, PortRef> outs;
    int w = 0, h = 0;
    int x = 0, y = 0;  // origin on the board

    Port port(const PortRef& r) const {
        const Transform t = shifted(parts[r.part].second, x, y);
        const Port& p = gadgets::find_template(parts[r.part].first).port(r.port);
        return {p.name, p.inbound, t.apply(p.entry), t.apply(p.direction)};
    }
};

// Parts are laid out so every external input arrives moving up and every
// external output leaves moving right.
Macro make_macro(const CircuitNode& node, bool dummy, int gap) {
    Macro m;
    m.node = node.id;
    m.kind = node.kind;
    m.dummy = dummy;
    switch (node.kind) {
        case NodeKind::Variable:
            m.parts = {{dummy ? "dummy_variable" : "variable", tf("rot270", 0, 5)}};
            if (!dummy) m.outs["out"] = {0, "out"};
            break;
        case NodeKind::Fanout:
            m.parts = {{"fanout", tf("flip_h", 3, 0)}, {"wire", tf("identity", -1, 5 + gap)}};
            m.internal = {{{0, "out1"}, {1, "in"}}};
            m.ins["in"] = {0, "in"};
            m.outs["out0"] = {0, "out0"};
            m.outs["out1"] = {1, "out"};
            break;
        case NodeKind::Choice:
            m.parts = {{"choice", tf("identity", 0, 0)}, {"wire", tf("identity", 1, 6 + gap)}};
            m.internal = {{{0, "out0"}, {1, "in"}}};
            m.ins["in"] = {0, "in"};
            m.outs["out0"] = {1, "out"};
            m.outs["out1"] = {0, "out1"};
            break;
        case NodeKind::And:
            m.parts = {{"and", tf("identity", 0, 0)}, {"wire", tf("identity", -4 - gap, -1)}};
            m.internal = {{{1, "out"}, {0, "in0"}}};
            m.ins["in0"] = {1, "in"};
            m.ins["in1"] = {0, "in1"};
            m.outs["out"] = {0, "out"};
            break;
        case NodeKind::Or:
            m.parts = {{"or", tf("identity", 0, 0)}, {"wire", tf("identity", -4 - gap, 0)}};
            m.internal = {{{1, "out"}, {0, "in1"}}};
            m.ins["in0"] = {0, "in0"};
            m.ins["in1"] = {1, "in"};
            m.outs["out"] = {0, "out"};
            break;
        case NodeKind::Victory:
            m.parts = {{node.victory_side == Side::Defender ? "defender_victory" : "attacker_victory",
                        tf("identity", 0, 0)}};
            m.ins["in"] = {0, "in"};
            break;
    }
    int min_c = 1 << 20, min_r = 1 << 20, max_c = -(1 << 20), max_r = -(1 << 20);
    for (const auto& [name, t] : m.parts) {
        const auto [lo, hi] = gadgets::transformed_box(gadgets::find_template(name), t);
        min_c = std::min(min_c, lo.col);
        min_r = std::min(min_r, lo.row);
        max_c = std::max(max_c, hi.col);
        max_r = std::max(max_r, hi.row);
    }
    for (auto& part : m.parts) part.second = shifted(part.second, -min_c, -min_r);
    m.w = max_c - min_c + 1;
    m.h = max_r - min_r + 1;
    return m;
}

bool on_ray(Square from, Dir d, Square to) {
    const int dc = to.col - from.col, dr = to.row - from.row;
    if (d.dc != 0) return dr == 0 && dc * d.dc > 0;
    return dc == 0 && dr * d.dr > 0;
}

struct Layout {
    std::vector<Macro> macros;  // in placement order, victory last
    std::map<std::string, int> macro_of;
    std::map<std::string, std::string> assignment;  // edge key -> macro input used
};

// Node order: dummy first, then nodes that do not feed the victory, then a
// post-order walk from the victory so that nested edges never interleave.
std::vector<std::string> placement_order(const CircuitGraph& g) {
    std::vector<std::string> post;
    std::set<std::string> seen;
    std::function<void(const std::string&)> visit = [&](const std::string& id) {
        if (!seen.insert(id).second) return;
        const CircuitNode* n = g.find(id);
        for (const auto& port : input_ports(n->kind))
            for (const CircuitEdge* e : g.inputs_of(id))
                if (e->to_port == port) visit(e->from);
        post.push_back(id);
    };
    visit(g.victory()->id);
    std::vector<std::string> order;
    for (const auto& id : g.topological_order())
        if (!seen.count(id)) order.push_back(id);
    order.insert(order.end(), post.begin(), post.end());
    return order;
}

}  // namespace

Compiled compile(const CircuitGraph& graph, int spacing) {
    graph.validate();
    if (spacing < 1) throw LayoutError("spacing must be positive");
    const CircuitNode* victory = graph.victory();
    if (!victory) throw LayoutError("circuit has no victory node");
    const Side true_side = victory->victory_side;

    Layout lay;
    const std::vector<std::string> order = placement_order(graph);
    int variables = 0;
    for (const auto& n : graph.nodes) variables += n.kind == NodeKind::Variable;
    std::string dummy_id;
    if (variables % 2 == 1) {
        dummy_id = "_dummy";
        while (graph.find(dummy_id)) dummy_id += "_";
        lay.macros.push_back(make_macro({dummy_id, NodeKind::Variable, Side::Defender}, true, spacing));
    }
    for (const auto& id : order) lay.macros.push_back(make_macro(*graph.find(id), false, spacing));
    for (std::size_t i = 0; i < lay.macros.size(); ++i) lay.macro_of[lay.macros[i].node] = static_cast<int>(i);

    // Symmetric two-input gates: the earlier source takes the input whose
    // column lies further right, otherwise the two L routes cross.
    for (const auto& n : graph.nodes) {
        const auto ins = graph.inputs_of(n.id);
        if (n.kind != NodeKind::And && n.kind != NodeKind::Or) {
            for (const CircuitEdge* e : ins) lay.assignment[e->key()] = e->to_port;
            continue;
        }
        const Macro& m = lay.macros[lay.macro_of[n.id]];
        const int c0 = m.port(m.ins.at("in0")).entry.col, c1 = m.port(m.ins.at("in1")).entry.col;
        const std::string right = c0 > c1 ? "in0" : "in1", left = c0 > c1 ? "in1" : "in0";
        const CircuitEdge* a = ins[0];
        const CircuitEdge* b = ins[1];
        if (lay.macro_of[a->from] > lay.macro_of[b->from]) std::swap(a, b);
        lay.assignment[a->key()] = right;
        lay.assignment[b->key()] = left;
    }

    std::vector<int> pre_gap(lay.macros.size(), spacing);
    pre_gap[0] = 2;
    for (int attempt = 0; attempt < 400; ++attempt) {
        // Diagonal placement; the victory cell is pinned to the top-right corner.
        int x = 0, y = 0;
        for (std::size_t i = 0; i + 1 < lay.macros.size(); ++i) {
            x += pre_gap[i];
            y += pre_gap[i];
            lay.macros[i].x = x;
            lay.macros[i].y = y;
            x += lay.macros[i].w;
            y += lay.macros[i].h;
        }
        Macro& vm = lay.macros.back();
        const int need = std::max(x + pre_gap.back() + vm.w, y + pre_gap.back() + vm.h) + 0;
        int size = 3;
        while (size < need) size += 4;
        vm.x = size - vm.w;
        vm.y = size - vm.h;

        Placement pl;
        pl.size = size;
        pl.spacing = spacing;
        pl.true_side = true_side;
        pl.dummy = dummy_id;
        const bool swap_colors = true_side == Side::Attacker;

        struct PendingInstance {
            std::string label, node, edge, tmpl;
            Transform t;
            bool swap;
        };
        std::vector<PendingInstance> pending;
        std::vector<std::vector<int>> part_index(lay.macros.size());
        for (std::size_t i = 0; i < lay.macros.size(); ++i) {
            const Macro& m = lay.macros[i];
            for (std::size_t k = 0; k < m.parts.size(); ++k) {
                part_index[i].push_back(static_cast<int>(pending.size()));
                const bool is_victory = m.kind == NodeKind::Victory;
                pending.push_back({k == 0 ? m.node : m.node + "/conv", m.node, "", m.parts[k].first,
                                   shifted(m.parts[k].second, m.x, m.y), swap_colors && !is_victory});
            }
        }
        struct PendingLink {
            int from;
            std::string from_port;
            int to;
            std::string to_port;
            Move move;
        };
        std::vector<PendingLink> plinks;
        for (std::size_t i = 0; i < lay.macros.size(); ++i) {
            const Macro& m = lay.macros[i];
            for (const auto& [o, in] : m.internal) {
                const Port po = m.port(o), pi = m.port(in);
                if (!(po.direction == pi.direction) || !on_ray(po.entry, po.direction, pi.entry))
                    throw LayoutError("internal ports of " + m.node + " do not line up");
                plinks.push_back({part_index[i][o.part], o.port, part_index[i][in.part], in.port, {po.entry, pi.entry}});
            }
        }
        std::map<std::string, std::vector<int>> chains;
        for (const auto& e : graph.edges) {
            const int si = lay.macro_of[e.from], di = lay.macro_of[e.to];
            const Macro& src = lay.macros[si];
            const Macro& dst = lay.macros[di];
            const std::string in_port = lay.assignment[e.key()];
            const PortRef so = src.outs.at(e.from_port), di_ref = dst.ins.at(in_port);
            const Port out = src.port(so), in = dst.port(di_ref);
            if (!(out.direction == gadgets::kRight) || !(in.direction == gadgets::kUp))
                throw LayoutError("port orientation mismatch on " + e.key());
            const int c = in.entry.col, r = out.entry.row;
            if (c - 3 <= src.x + src.w - 1 || in.entry.row <= r + 1)
                throw LayoutError("edge " + e.key() + " cannot be routed up and to the right");
            const int w = static_cast<int>(pending.size());
            pending.push_back({e.key() + "#0", "", e.key(), "wire", tf("transpose", c - 3, r - 2),
                               swap_colors});
            chains[e.key()].push_back(w);
            const Port w_in = {"in", true, {c, r}, gadgets::kRight};
            const Port w_out = {"out", false, {c, r - 2}, gadgets::kUp};
            plinks.push_back({part_index[si][so.part], so.port, w, "in", {out.entry, w_in.entry}});
            plinks.push_back({w, "out", part_index[di][di_ref.part], di_ref.port, {w_out.entry, in.entry}});
        }

        // Geometry checks that decide whether this attempt is usable.
        std::vector<std::pair<Square, Square>> boxes;
        for (const auto& pi : pending) boxes.push_back(gadgets::transformed_box(gadgets::find_template(pi.tmpl), pi.t));
        auto inside = [](const std::pair<Square, Square>& b, Square s, int pad) {
            return s.col >= b.first.col - pad && s.col <= b.second.col + pad && s.row >= b.first.row - pad &&
                   s.row <= b.second.row + pad;
        };
        for (std::size_t a = 0; a < boxes.size(); ++a) {
            if (boxes[a].first.col < 0 || boxes[a].first.row < 0 || boxes[a].second.col >= size ||
                boxes[a].second.row >= size)
                throw LayoutError(pending[a].label + " does not fit the board");
            for (std::size_t b = a + 1; b < boxes.size(); ++b) {
                const auto& p = boxes[a];
                const auto& q = boxes[b];
                if (p.first.col <= q.second.col && q.first.col <= p.second.col && p.first.row <= q.second.row &&
                    q.first.row <= p.second.row)
                    throw LayoutError(pending[a].label + " overlaps " + pending[b].label);
            }
        }
        for (std::size_t a = 0; a < plinks.size(); ++a) {
            const Link la{plinks[a].from, plinks[a].from_port, plinks[a].to, plinks[a].to_port, plinks[a].move};
            for (const Square& s : la.lane())
                for (std::size_t b = 0; b < boxes.size(); ++b)
                    if (static_cast<int>(b) != la.from_instance && static_cast<int>(b) != la.to_instance &&
                        inside(boxes[b], s, 0))
                        throw LayoutError("lane " + move_name(la.move) + " runs through " + pending[b].label);
            for (std::size_t b = a + 1; b < plinks.size(); ++b) {
                const Link lb{plinks[b].from, plinks[b].from_port, plinks[b].to, plinks[b].to_port, plinks[b].move};
                const std::set<int> ends{la.from_instance, la.to_instance};
                if (ends.count(lb.from_instance) || ends.count(lb.to_instance)) continue;
                for (const Square& s : la.lane()) {
                    const auto lb_lane = lb.lane();
                    if (std::find(lb_lane.begin(), lb_lane.end(), s) != lb_lane.end())
                        throw LayoutError("lanes " + move_name(la.move) + " and " + move_name(lb.move) + " cross at " +
                                          square_name(s));
                }
            }
        }
        // The throne must stay clear of every box and lane, with a margin.
        const int mid = size / 2;
        const Square throne{mid, mid};
        bool throne_hit = false;
        for (const auto& b : boxes) throne_hit |= inside(b, throne, 1);
        for (const auto& l : plinks) {
            const Link lk{l.from, l.from_port, l.to, l.to_port, l.move};
            for (const Square& s : lk.lane())
                throne_hit |= std::abs(s.col - mid) <= 1 && std::abs(s.row - mid) <= 1;
        }
        if (throne_hit) {
            // Push the cell that sits on the centre (or the first one beyond it)
            // further out and try again.
            std::size_t bump = lay.macros.size() - 1;
            for (std::size_t i = 0; i + 1 < lay.macros.size(); ++i)
                if (lay.macros[i].x + lay.macros[i].w + 1 >= mid || lay.macros[i].y + lay.macros[i].h + 1 >= mid) {
                    bump = i;
                    break;
                }
            ++pre_gap[bump];
            continue;
        }

        GameState st(BoardGeometry::standard(size), RuleConfig{}, true_side, false);
        for (const auto& pi : pending) {
            Instance in = gadgets::instantiate(gadgets::find_template(pi.tmpl), pi.t, st, pi.swap);
            pl.instances.push_back({pi.label, pi.node, pi.edge, std::move(in)});
        }
        for (std::size_t i = 0; i < lay.macros.size(); ++i) pl.node_instance[lay.macros[i].node] = part_index[i][0];
        for (const auto& l : plinks) pl.links.push_back({l.from, l.from_port, l.to, l.to_port, l.move});
        pl.chains = chains;
        for (const auto& [k, v] : lay.assignment) pl.input_assignment[k] = v;
        st.set_to_move(true_side);
        st.reset_history();

        InterferenceReport rep = check_interference(st, pl);
        if (!rep.clean()) throw InterferenceError(rep);
        return {std::move(st), std::move(pl)};
    }
    throw LayoutError("could not keep the throne clear of the layout");
}

// ---------------------------------------------------------------------------
// Strategy simulation

namespace {

std::vector<Move> trace_set(const char* trace, std::size_t ply) {
    const gadgets::GadgetTrace* t = gadgets::catalog().find_trace(trace);
    const auto& p = t->plies.at(ply);
    std::vector<Move> out = p.expected;
    out.insert(out.end(), p.unlisted.begin(), p.unlisted.end());
    return out;
}

// Native reply of the false player when a soldier enters `port`.
std::vector<Move> native_reply(const std::string& tmpl, const std::string& port) {
    if (tmpl == "wire") return trace_set("wire", 1);
    if (tmpl == "defender_victory") return trace_set("defender_victory_active", 1);
    if (tmpl == "fanout") return trace_set("fanout", 1);
    if (tmpl == "choice") return trace_set("choice", 1);
    if (tmpl == "and") return trace_set("and_both", port == "in0" ? 1 : 3);
    if (tmpl == "or") return trace_set(port == "in0" ? "or_column" : "or_row", 1);
    return {};
}

std::vector<Move> mapped(const std::vector<Move>& native, const Transform& t) {
    std::vector<Move> out;
    for (const Move& m : native) out.push_back(t.apply(m));
    std::sort(out.begin(), out.end());
    return out;
}

bool contains(const std::vector<Move>& v, const Move& m) { return std::find(v.begin(), v.end(), m) != v.end(); }

std::string list(const std::vector<Move>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + move_name(v[i]);
    return s + "}";
}

}  // namespace

std::string SimulationReport::text() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < plies.size(); ++i) {
        const auto& p = plies[i];
        os << i << ' ' << side_name(p.mover) << ' ' << move_name(p.played) << "  forced " << list(p.forced);
        if (!p.note.empty()) os << "  " << p.note;
        os << '\n';
    }
    os << "victory " << (victory_activated ? "activated" : "inactive") << ", result " << terminal_name(result);
    if (solver_plies) os << " (solver: decided in " << *solver_plies << " plies)";
    os << ", true player " << (true_player_wins ? "wins" : "loses");
    if (unscripted) os << ", " << unscripted << " unscripted true-player options seen";
    if (stale_captures) os << ", " << stale_captures << " stale captures offered to the false player";
    if (refuted) os << ", " << refuted << " early King captures refuted by the solver";
    if (alternate_hammers) os << ", " << alternate_hammers << " alternate hammers from other gadgets";
    os << '\n';
    return os.str();
}

SimulationReport simulate_strategy(const GameState& initial, const Placement& placement,
                                   const StrategyChoices& choices) {
    SimulationReport rep;
    const Side T = placement.true_side, F = opponent(T);
    const auto& insts = placement.instances;

    int victory = -1;
    std::vector<int> variables;  // instance indices, placement order
    std::map<std::string, int> var_of;
    for (std::size_t i = 0; i < insts.size(); ++i) {
        const auto& n = insts[i].inst.template_name;
        if (n == "defender_victory" || n == "attacker_victory") victory = static_cast<int>(i);
        if ((n == "variable" || n == "dummy_variable") && insts[i].edge.empty()) {
            variables.push_back(static_cast<int>(i));
            var_of[insts[i].node] = static_cast<int>(i);
        }
    }
    if (victory < 0) throw std::invalid_argument("placement has no victory gadget");
    for (const auto* q : {&choices.true_claims, &choices.false_claims})
        for (const std::string& v : *q)
            if (!var_of.count(v)) throw std::invalid_argument("no variable named " + v);
    for (const auto& [node, dir] : choices.choice_out) {
        auto it = placement.node_instance.find(node);
        if (it == placement.node_instance.end() || insts[it->second].inst.template_name != "choice")
            throw std::invalid_argument("no choice node named " + node);
        if (dir != 0 && dir != 1) throw std::invalid_argument("choice direction must be 0 or 1");
        const std::string port = dir == 0 ? "out0" : "out1";
        bool wired = false;
        for (const Link& l : placement.links) wired |= l.from_instance == it->second && l.from_port == port;
        if (!wired) throw std::invalid_argument("choice " + node + " has nothing connected to " + port);
    }
    const Transform& vt = insts[victory].inst.transform;
    const bool defender_side = insts[victory].inst.template_name == "defender_victory";

    const std::vector<Move> claim_native_true = trace_set("variable_white", 0);
    const std::vector<Move> claim_native_false = trace_set("variable_black", 0);
    auto claim_move = [&](int var, bool for_true) {
        return insts[var].inst.transform.apply((for_true ? claim_native_true : claim_native_false).front());
    };
    const std::vector<Move> premature =
        defender_side ? std::vector<Move>{vt.apply(parse_move("c6-e6"))}
                      : mapped(trace_set("attacker_victory_inactive", 0), vt);
    const std::vector<Move> follow_up =
        defender_side ? mapped(trace_set("defender_victory_active", 2), vt) : std::vector<Move>{};

    // The attacker-victory King may take e5 early; the gadget relies on that
    // losing the King at once. Accepted only when the solver confirms it.
    const std::optional<Move> king_dash =
        defender_side ? std::nullopt : std::optional<Move>(vt.apply(parse_move("a6-e6")));
    std::vector<int> unclaimed = variables;
    std::vector<std::string> true_queue = choices.true_claims, false_queue = choices.false_claims;
    auto pick_claim = [&](std::vector<std::string>& queue) {
        while (!queue.empty()) {
            auto it = var_of.find(queue.front());
            queue.erase(queue.begin());
            if (it != var_of.end() && std::find(unclaimed.begin(), unclaimed.end(), it->second) != unclaimed.end())
                return it->second;
        }
        return unclaimed.front();
    };
    auto link_allowed = [&](const Link& l) {
        const auto& src = insts[l.from_instance < 0 ? 0 : l.from_instance];
        if (l.from_instance < 0 || src.inst.template_name != "choice") return true;
        auto it = choices.choice_out.find(src.node);
        const int want = it == choices.choice_out.end() ? 0 : it->second;
        return l.from_port == (want == 0 ? "out0" : "out1");
    };
    const Verdict true_win = T == Side::Defender ? Verdict::DefenderWin : Verdict::AttackerWin;
    const Verdict false_win = T == Side::Defender ? Verdict::AttackerWin : Verdict::DefenderWin;

    GameState st = initial;
    std::vector<Move> reply;  // exact forced set expected from the false player next
    int reply_source = -1;
    bool reply_quiet = false;
    int ply = 0;
    // Current owner of every piece; a soldier crossing a link joins the gadget it enters.
    std::map<Square, int> owner;
    for (int i = 0; i < st.geometry().width() * st.geometry().height(); ++i)
        if (st.at(i) != Cell::Empty)
            if (auto o = placement.owner(st.geometry().square(i))) owner[st.geometry().square(i)] = *o;
    std::set<int> spent;  // instances whose output has left
    auto owner_of = [&](Square s) {
        auto it = owner.find(s);
        return it == owner.end() ? -1 : it->second;
    };
    auto play = [&](const Move& m, std::vector<Move> forced, std::string note) {
        rep.plies.push_back({st.to_move(), std::move(forced), m, std::move(note)});
        auto [next, result] = apply_move(st, m);
        int o = owner_of(m.from);
        for (const Link& l : placement.links)
            if (l.move == m) {
                o = l.to_instance;
                if (l.from_instance >= 0) spent.insert(l.from_instance);
            }
        owner.erase(m.from);
        for (const Square& c : result.captures) owner.erase(c);
        owner[m.to] = o;
        st = std::move(next);
        ++ply;
    };
    // Captures that only take pieces of gadgets that already fired.
    auto stale = [&](const Move& m) {
        const auto caps = captures_of(st, m);
        if (caps.empty()) return false;
        for (const Square& c : caps)
            if (!spent.count(owner_of(c))) return false;
        return true;
    };
    auto refuted = [&](const Move& m) {
        if (!king_dash || !(m == *king_dash)) return false;
        const Outcome o = solve(apply_move(st, m).first, SearchLimits{1, std::nullopt, std::nullopt});
        if (o.verdict != true_win) return false;
        ++rep.refuted;
        return true;
    };
    auto finish_with_solver = [&](int depth, Verdict want, const char* what) {
        const Outcome o = solve(st, SearchLimits{depth, std::nullopt, std::nullopt});
        if (o.verdict != want)
            throw ScriptDiverged(ply, {}, {},
                                 std::string(what) + ": solver gives " + verdict_name(o.verdict) + " within " +
                                     std::to_string(depth) + " plies from " + emit_fen(st));
        rep.solver_plies = o.plies;
        for (const Move& m : o.line) {
            std::vector<Move> forced;
            if (forced_active(st)) forced = legal_moves(st);
            std::sort(forced.begin(), forced.end());
            play(m, std::move(forced), "solver line");
        }
    };

    while (terminal_status(st) == Terminal::None) {
        const Side mover = st.to_move();
        std::vector<Move> forced = legal_moves(st);
        std::sort(forced.begin(), forced.end());
        const bool active = forced_active(st);

        if (mover == F) {
            if (!unclaimed.empty()) {
                std::vector<Move> want;
                for (int v : unclaimed) want.push_back(claim_move(v, false));
                for (const Move& m : forced)
                    if (!contains(want, m) && refuted(m)) want.push_back(m);
                std::sort(want.begin(), want.end());
                if (!active || forced != want)
                    throw ScriptDiverged(ply, forced, want, "false player's claim options differ from the open variables");
                const int v = pick_claim(false_queue);
                unclaimed.erase(std::find(unclaimed.begin(), unclaimed.end(), v));
                play(claim_move(v, false), forced, "claims " + insts[v].node + " false");
                continue;
            }
            if (reply_quiet) {
                if (active)
                    for (const Move& m : forced)
                        if (!stale(m)) throw ScriptDiverged(ply, forced, {}, "false player should have no forcing move");
                if (active) rep.stale_captures += static_cast<int>(forced.size());
                finish_with_solver(2, true_win, "victory follow-up");
                break;
            }
            if (reply.empty()) throw ScriptDiverged(ply, forced, {}, "no scripted reply for the false player");
            // A soldier of the feeding gadget that lands on the scripted
            // square is the same reply with a different hammer. A soldier of
            // any other gadget counts too when it takes exactly the same pieces.
            std::vector<Move> want = reply;
            std::string extra;
            for (const Move& m : forced) {
                if (contains(want, m)) continue;
                bool same = false;
                bool foreign = false;
                for (const Move& r : reply) {
                    if (!(m.to == r.to)) continue;
                    if (owner_of(m.from) == reply_source) same = true;
                    else if (captures_of(st, m) == captures_of(st, r)) same = foreign = true;
                }
                if (same) {
                    want.push_back(m);
                    if (foreign) {
                        extra += (extra.empty() ? "; alternate hammer " : " ") + move_name(m);
                        ++rep.alternate_hammers;
                    }
                } else if (refuted(m)) {
                    want.push_back(m);
                } else if (stale(m)) {
                    want.push_back(m);
                    extra += (extra.empty() ? "; stale captures " : " ") + move_name(m);
                    ++rep.stale_captures;
                }
            }
            std::sort(want.begin(), want.end());
            if (!active || forced != want)
                throw ScriptDiverged(ply, forced, want, "false player's reply differs from the gadget script");
            const Move m = reply.front();
            reply.clear();
            play(m, forced, "scripted reply" + extra);
            continue;
        }

        // True player. Options outside the plan are its own business; they are
        // noted but never taken.
        std::vector<Move> planned = premature;
        for (int v : unclaimed) planned.push_back(claim_move(v, true));
        for (const Link& l : placement.links) planned.push_back(l.move);
        planned.insert(planned.end(), follow_up.begin(), follow_up.end());
        std::string extra;
        if (active)
            for (const Move& m : forced)
                if (!contains(planned, m)) {
                    extra += (extra.empty() ? "unscripted " : " ") + move_name(m);
                    ++rep.unscripted;
                }
        auto with_extra = [&](std::string note) { return extra.empty() ? note : note + "; " + extra; };

        if (!unclaimed.empty()) {
            const int v = pick_claim(true_queue);
            const Move m = claim_move(v, true);
            if (!contains(forced, m)) throw ScriptDiverged(ply, forced, {m}, "claim move not available");
            unclaimed.erase(std::find(unclaimed.begin(), unclaimed.end(), v));
            play(m, forced, with_extra("claims " + insts[v].node + " true"));
            continue;
        }
        if (rep.victory_activated) {
            const Move m = vt.apply(parse_move("c6-e6"));
            if (!contains(forced, m)) throw ScriptDiverged(ply, forced, {m}, "victory follow-up not available");
            reply_quiet = true;
            play(m, forced, with_extra("King heads for the haven"));
            continue;
        }
        const Link* next = nullptr;
        if (active)
            for (const Link& l : placement.links)
                if (contains(forced, l.move) && link_allowed(l)) {
                    next = &l;
                    break;
                }
        if (!next) {
            // Out of activations: the false player must now be winning.
            finish_with_solver(6, false_win, "inactive victory");
            break;
        }
        const auto& target = insts[next->to_instance];
        if (next->to_instance == victory) rep.victory_activated = true;
        reply = mapped(native_reply(target.inst.template_name, next->to_port), target.inst.transform);
        reply_source = next->from_instance;
        play(next->move, forced, with_extra("enters " + target.label + "." + next->to_port));
    }
    rep.result = terminal_status(st);
    rep.true_player_wins = rep.result == (T == Side::Defender ? Terminal::DefenderWin : Terminal::AttackerWin);
    return rep;
}

}  // namespace tafl
