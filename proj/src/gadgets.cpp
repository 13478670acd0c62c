#include "tafl/gadgets.hpp"

#include <algorithm>
#include <sstream>

#include "tafl/notation.hpp"
#include "tafl/rules.hpp"

namespace tafl::gadgets {

std::string dir_name(Dir d) {
    if (d == kUp) return "up";
    if (d == kDown) return "down";
    if (d == kRight) return "right";
    if (d == kLeft) return "left";
    return "(" + std::to_string(d.dc) + "," + std::to_string(d.dr) + ")";
}

const Port& GadgetTemplate::port(const std::string& n) const {
    for (const Port& p : ports)
        if (p.name == n) return p;
    throw std::out_of_range("template " + name + " has no port " + n);
}

const Port& Instance::port(const std::string& n) const {
    for (const Port& p : ports)
        if (p.name == n) return p;
    throw std::out_of_range("instance of " + template_name + " has no port " + n);
}

namespace {

struct Orientation {
    const char* name;
    int a, b, c, d;
};

constexpr Orientation kOrientations[] = {
    {"identity", 1, 0, 0, 1},  {"rot90", 0, -1, 1, 0},     {"rot180", -1, 0, 0, -1},
    {"rot270", 0, 1, -1, 0},   {"flip_h", -1, 0, 0, 1},    {"flip_v", 1, 0, 0, -1},
    {"transpose", 0, 1, 1, 0}, {"antitranspose", 0, -1, -1, 0},
};

}  // namespace

Transform Transform::named(const std::string& name) {
    for (const auto& o : kOrientations)
        if (name == o.name) return {o.a, o.b, o.c, o.d, 0, 0};
    throw std::invalid_argument("unknown orientation " + name);
}

const std::vector<std::string>& Transform::orientation_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& o : kOrientations) v.emplace_back(o.name);
        return v;
    }();
    return names;
}

Transform Transform::fit(const std::string& name, int w, int h, int dx, int dy) {
    Transform t = named(name);
    const Square corners[] = {{0, 0}, {w - 1, 0}, {0, h - 1}, {w - 1, h - 1}};
    int min_c = 1 << 30, min_r = 1 << 30;
    for (const Square& s : corners) {
        const Square m = t.apply(s);
        min_c = std::min(min_c, m.col);
        min_r = std::min(min_r, m.row);
    }
    t.dx = dx - min_c;
    t.dy = dy - min_r;
    return t;
}

Transform Transform::compose(const Transform& o) const {
    Transform r;
    r.a = a * o.a + b * o.c;
    r.b = a * o.b + b * o.d;
    r.c = c * o.a + d * o.c;
    r.d = c * o.b + d * o.d;
    r.dx = a * o.dx + b * o.dy + dx;
    r.dy = c * o.dx + d * o.dy + dy;
    return r;
}

std::string Transform::name() const {
    std::string n = "custom";
    for (const auto& o : kOrientations)
        if (a == o.a && b == o.b && c == o.c && d == o.d) n = o.name;
    return n + "+(" + std::to_string(dx) + "," + std::to_string(dy) + ")";
}

Cell swap_color(Cell c) {
    if (c == Cell::AttackerSoldier) return Cell::DefenderSoldier;
    if (c == Cell::DefenderSoldier) return Cell::AttackerSoldier;
    return c;
}

std::pair<Square, Square> transformed_box(const GadgetTemplate& t, const Transform& tf) {
    const Square p = tf.apply(Square{0, 0});
    const Square q = tf.apply(Square{t.width - 1, t.height - 1});
    return {Square{std::min(p.col, q.col), std::min(p.row, q.row)},
            Square{std::max(p.col, q.col), std::max(p.row, q.row)}};
}

Instance instantiate(const GadgetTemplate& t, const Transform& tf, GameState& board, bool swap_colors) {
    const BoardGeometry& g = board.geometry();
    Instance inst;
    inst.template_name = t.name;
    inst.transform = tf;
    inst.colors_swapped = swap_colors;
    std::tie(inst.box_min, inst.box_max) = transformed_box(t, tf);
    // The box may hang off the board as long as every piece lands on it.
    if (t.haven) {
        const Square h = tf.apply(*t.haven);
        if (!g.is_haven(h))
            throw AnchorError(t.name + " needs a haven at " + square_name(h));
    }
    for (const PlacedPiece& p : t.pieces) {
        const Square s = tf.apply(p.square);
        if (!g.on_board(s))
            throw OverlapError(t.name + " at " + tf.name() + ": square " + square_name(s) + " is off the board");
        if (board.at(s) != Cell::Empty)
            throw OverlapError(t.name + ": square " + square_name(s) + " is occupied");
        if (g.is_haven(s) || g.is_throne(s))
            throw OverlapError(t.name + ": square " + square_name(s) + " is a throne or haven");
        Cell c = p.cell;
        if (swap_colors) {
            if (c == Cell::King) throw AnchorError(t.name + " holds a King and cannot swap colors");
            c = swap_color(c);
        }
        inst.pieces.push_back({s, c});
    }
    for (const PlacedPiece& p : inst.pieces) board.place(p.square, *piece_of(p.cell));
    inst.box_min = {std::max(inst.box_min.col, 0), std::max(inst.box_min.row, 0)};
    inst.box_max = {std::min(inst.box_max.col, g.width() - 1), std::min(inst.box_max.row, g.height() - 1)};
    for (const Port& p : t.ports)
        inst.ports.push_back({p.name, p.inbound, tf.apply(p.entry), tf.apply(p.direction)});
    return inst;
}

std::vector<Square> Lane::squares() const {
    std::vector<Square> out;
    const int dc = (to.col > from.col) - (to.col < from.col);
    const int dr = (to.row > from.row) - (to.row < from.row);
    if (dc != 0 && dr != 0) throw std::invalid_argument("lane is not straight");
    Square s = from;
    while (true) {
        out.push_back(s);
        if (s == to) break;
        s.col += dc;
        s.row += dr;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Catalog data

namespace {

std::vector<PlacedPiece> pcs(const std::string& spec) {
    std::vector<PlacedPiece> out;
    std::istringstream is(spec);
    std::string tok;
    while (is >> tok) {
        const char k = tok.back();
        const Square s = parse_square(tok.substr(0, tok.size() - 1));
        Cell c = k == 'p' ? Cell::AttackerSoldier : k == 'P' ? Cell::DefenderSoldier : Cell::King;
        out.push_back({s, c});
    }
    return out;
}

std::vector<Move> mvs(const std::string& spec) {
    std::vector<Move> out;
    std::istringstream is(spec);
    std::string tok;
    while (is >> tok) out.push_back(parse_move(tok));
    std::sort(out.begin(), out.end());
    return out;
}

Square sq(const char* name) { return parse_square(name); }

Lane lane(const char* a, const char* b) { return {sq(a), sq(b)}; }

ScriptedPly W(const std::string& expected, const char* chosen, const std::string& unlisted = "") {
    return {Side::Defender, mvs(expected), parse_move(chosen), false, mvs(unlisted)};
}
ScriptedPly B(const std::string& expected, const char* chosen, const std::string& unlisted = "") {
    return {Side::Attacker, mvs(expected), parse_move(chosen), false, mvs(unlisted)};
}
ScriptedPly pass(Side s) { return {s, {}, std::nullopt, true, {}}; }

Port in_port(const char* name, const char* entry, Dir d) { return {name, true, sq(entry), d}; }
Port out_port(const char* name, const char* entry, Dir d) { return {name, false, sq(entry), d}; }

std::vector<GadgetTemplate> make_templates() {
    std::vector<GadgetTemplate> t;
    t.push_back({"wire", 4, 5, pcs("c5p a4P b4p d3p"),
                 {in_port("in", "c4", kUp), out_port("out", "a4", kRight)}, std::nullopt});
    t.push_back({"defender_victory", 5, 7, pcs("b7P c7P d7p a6p c6K c5p e5p b4p d4p e4P"),
                 {in_port("in", "c4", kUp)}, sq("e7")});
    t.push_back({"attacker_victory", 5, 7, pcs("a7p d7P a6K b5P c5P d5p e5p e4P d2P d1p"),
                 {in_port("in", "a5", kUp)}, sq("e7")});
    t.push_back({"variable", 6, 2, pcs("a2p c2P d2p f2P d1P"), {out_port("out", "d1", kUp)},
                 std::nullopt});
    t.push_back({"dummy_variable", 6, 2, pcs("a2p c2P d2p f2P"), {}, std::nullopt});
    t.push_back({"fanout", 4, 5, pcs("b5p c4p d4P a3p c2P"),
                 {in_port("in", "b4", kUp), out_port("out0", "d4", kLeft), out_port("out1", "c2", kUp)},
                 std::nullopt});
    t.push_back({"choice", 6, 6, pcs("a6P b5p c4p a3p b3P c3p c2p"),
                 {in_port("in", "d3", kUp), out_port("out0", "d3", kUp), out_port("out1", "d3", kRight)},
                 std::nullopt});
    t.push_back({"and", 5, 9, pcs("a9P c9p d5p c4p c3p d3P e3p c1P"),
                 {in_port("in0", "b3", kRight), in_port("in1", "d3", kUp), out_port("out", "a9", kRight)},
                 std::nullopt});
    t.push_back({"or", 6, 9, pcs("b9P d9p d4p e4P f4p d2P"),
                 {in_port("in0", "c4", kUp), in_port("in1", "c4", kRight), out_port("out", "b9", kRight)},
                 std::nullopt});
    return t;
}

GadgetTrace base(const char* name, const char* figure, const char* desc, int w, int h,
                 std::vector<InstanceSpec> inst, const char* extras, Side first) {
    GadgetTrace t;
    t.name = name;
    t.figure = figure;
    t.description = desc;
    t.width = w;
    t.height = h;
    t.instances = std::move(inst);
    t.extras = pcs(extras);
    t.first_mover = first;
    return t;
}

InstanceSpec at(const char* tmpl, const char* orient = "identity", int dx = 0, int dy = 0,
                bool swap = false) {
    Transform tf = Transform::named(orient);
    tf.dx = dx;
    tf.dy = dy;
    return {tmpl, tf, swap};
}

std::vector<GadgetTrace> make_template_traces() {
    std::vector<GadgetTrace> v;
    const Side Wh = Side::Defender, Bl = Side::Attacker;

    {
        auto t = base("wire", "3", "wire activated from column c", 4, 5, {at("wire")}, "c1P", Wh);
        t.plies = {W("c1-c4", "c1-c4"), B("d3-c3", "d3-c3")};
        t.post.clear = {lane("b4", "d4")};
        v.push_back(t);
    }
    {
        auto t = base("wire_diode", "4", "wire entered backwards along row 4", 4, 5, {at("wire")},
                      "d4P", Wh);
        t.plies = {W("d4-c4", "d4-c4"), B("d3-c3", "d3-c3")};
        t.post.no_entry = {{Wh, lane("c1", "c3")}};
        t.post.blocked = {lane("c3", "c3")};
        v.push_back(t);
    }
    {
        auto t = base("defender_victory_active", "5a", "defender victory with White entering at c1", 5,
                      7, {at("defender_victory")}, "c1P", Wh);
        t.havens = {sq("e7")};
        t.plies = {W("c1-c4 c6-e6", "c1-c4"), B("d7-d4", "d7-d4"), W("c6-e6", "c6-e6", "c6-c4")};
        t.post.quiet = {Bl};
        t.post.solver = SolverClaim{2, Verdict::DefenderWin};
        v.push_back(t);
    }
    {
        auto t = base("defender_victory_inactive", "5a", "defender victory without an entry", 5, 7,
                      {at("defender_victory")}, "", Wh);
        t.havens = {sq("e7")};
        t.post.solver = SolverClaim{6, Verdict::AttackerWin};
        v.push_back(t);
    }
    {
        auto t = base("attacker_victory_active", "5b", "attacker victory with Black entering at a1", 5,
                      7, {at("attacker_victory")}, "a1p", Bl);
        t.havens = {sq("e7")};
        t.plies = {B("a1-a5 d5-d3", "a1-a5", "a7-c7")};
        t.post.terminal = Terminal::AttackerWin;
        v.push_back(t);
    }
    {
        auto t = base("attacker_victory_inactive", "5b", "attacker victory without an entry", 5, 7,
                      {at("attacker_victory")}, "", Bl);
        t.havens = {sq("e7")};
        t.plies = {B("d5-d3", "d5-d3", "a7-c7"), W("a6-e6", "a6-e6")};
        t.post.solver = SolverClaim{2, Verdict::DefenderWin};
        v.push_back(t);
    }
    {
        auto t = base("variable_white", "6", "White claims the variable", 6, 2, {at("variable")}, "", Wh);
        t.plies = {W("f2-e2", "f2-e2")};
        t.post.clear = {lane("d2", "d2")};
        v.push_back(t);
    }
    {
        auto t = base("variable_black", "6", "Black claims the variable", 6, 2, {at("variable")}, "", Bl);
        t.plies = {B("a2-b2", "a2-b2")};
        t.post.quiet = {Wh};
        t.post.blocked = {lane("d2", "d2")};
        v.push_back(t);
    }
    {
        auto t = base("dummy_variable_white", "6", "White takes the dummy variable", 6, 2,
                      {at("dummy_variable")}, "", Wh);
        t.plies = {W("f2-e2", "f2-e2")};
        v.push_back(t);
    }
    {
        auto t = base("dummy_variable_black", "6", "Black takes the dummy variable", 6, 2,
                      {at("dummy_variable")}, "", Bl);
        t.plies = {B("a2-b2", "a2-b2")};
        v.push_back(t);
    }
    {
        auto t = base("fanout", "7a", "fanout activated from column b", 4, 5, {at("fanout")}, "b1P", Wh);
        t.plies = {W("b1-b4", "b1-b4"), B("a3-b3", "a3-b3")};
        t.post.clear = {lane("c4", "a4"), lane("c3", "c5")};
        v.push_back(t);
    }
    {
        auto t = base("choice", "7b", "choice: stop at d3", 6, 6, {at("choice")}, "d1P", Wh);
        t.plies = {W("d1-d3", "d1-d3"), B("c2-c3 c4-c3", "c4-c3")};
        t.post.clear = {lane("d4", "d6"), lane("e3", "f3")};
        v.push_back(t);
    }
    {
        auto t = base("and_both", "8a", "AND with both inputs", 5, 9, {at("and")}, "a3P d1P", Wh);
        t.plies = {W("a3-b3", "a3-b3"), B("c4-c3", "c4-c3"), W("d1-d3", "d1-d3"), B("c9-c3", "c9-c3")};
        t.post.clear = {lane("b9", "e9")};
        v.push_back(t);
    }
    {
        auto t = base("and_single", "8a", "AND with only the row-3 input", 5, 9, {at("and")}, "a3P", Wh);
        t.plies = {W("a3-b3", "a3-b3"), B("c4-c3", "c4-c3")};
        t.post.quiet = {Wh};
        t.post.blocked = {lane("b9", "e9")};
        v.push_back(t);
    }
    {
        auto t = base("or_column", "8b", "OR through the column-c input", 6, 9, {at("or")}, "c1P", Wh);
        t.plies = {W("c1-c4", "c1-c4"), B("d9-d4", "d9-d4")};
        t.post.clear = {lane("c9", "f9")};
        v.push_back(t);
    }
    {
        auto t = base("or_row", "8b", "OR through the row-4 input", 6, 9, {at("or")}, "a4P", Wh);
        t.plies = {W("a4-c4", "a4-c4"), B("d9-d4", "d9-d4")};
        t.post.clear = {lane("c9", "f9")};
        v.push_back(t);
    }
    {
        auto t = base("or_both", "8b", "OR with both inputs; the second cannot enter", 6, 9, {at("or")},
                      "c1P a4P", Wh);
        t.plies = {W("a4-c4 c1-c4", "c1-c4"), B("d9-d4", "d9-d4")};
        t.post.quiet = {Wh};
        t.post.clear = {lane("c9", "f9")};
        v.push_back(t);
    }
    return v;
}

std::vector<GadgetTrace> make_appendix_traces() {
    std::vector<GadgetTrace> v;
    const Side Wh = Side::Defender, Bl = Side::Attacker;

    {
        auto t = base("wire_wire", "9", "two adjacent wires", 9, 6,
                      {at("wire"), at("wire", "transpose", 4, 1)}, "c1P", Wh);
        t.plies = {W("c1-c4", "c1-c4"), B("d3-c3", "d3-c3"), W("a4-h4", "a4-h4"), B("g5-g4", "g5-g4")};
        t.post.clear = {lane("h3", "h6")};
        v.push_back(t);
    }
    {
        auto t = base("wire_defender_victory", "10", "wire feeding the defender victory", 9, 6,
                      {at("wire"), at("defender_victory", "transpose", 2, 1)}, "c1P", Wh);
        t.havens = {sq("i6")};
        t.plies = {W("c1-c4 h4-h6", "c1-c4"), B("d3-c3", "d3-c3"), W("a4-f4 h4-h6", "a4-f4"),
                   B("c5-f5 i5-f5", "i5-f5"), W("h4-h6", "h4-h6", "h4-f4")};
        t.post.quiet = {Bl};
        t.post.solver = SolverClaim{2, Verdict::DefenderWin};
        v.push_back(t);
    }
    {
        auto t = base("wire_attacker_victory", "11", "color-swapped wire feeding the attacker victory",
                      12, 7, {at("wire", "identity", 0, -1, true), at("attacker_victory", "transpose", 5, 2)},
                      "c1p", Bl);
        t.havens = {sq("l7")};
        t.plies = {B("c1-c3 j6-h6", "c1-c3", "l3-l5"), W("d2-c2 k3-k7", "d2-c2"), B("a3-j3 j6-h6", "a3-j3", "l3-l5")};
        t.post.terminal = Terminal::AttackerWin;
        v.push_back(t);
    }
    {
        auto t = base("variable_wire_black", "12", "variable and wire, Black claims", 6, 6,
                      {at("variable", "rot270", 0, 5), at("wire", "transpose", 1, 0)}, "", Bl);
        t.plies = {B("b6-b5", "b6-b5")};
        t.post.quiet = {Wh};
        t.post.blocked = {lane("b3", "f3")};
        v.push_back(t);
    }
    {
        auto t = base("variable_wire_white", "13", "variable and wire, White claims", 6, 6,
                      {at("variable", "rot270", 0, 5), at("wire", "transpose", 1, 0)}, "", Wh);
        t.plies = {W("b1-b2", "b1-b2"), pass(Bl), W("a3-e3", "a3-e3"), B("d4-d3", "d4-d3")};
        t.post.clear = {lane("e2", "e6")};
        v.push_back(t);
    }
    {
        auto t = base("fanout_wires", "14", "fanout with three wires", 13, 9,
                      {at("wire"), at("fanout", "rot270", 4, 4), at("wire", "transpose", 8, 0),
                       at("wire", "identity", 5, 4)},
                      "c1P", Wh);
        t.plies = {W("c1-c4", "c1-c4"), B("d3-c3", "d3-c3"), W("a4-h4", "a4-h4"), B("g5-g4", "g5-g4"),
                   W("f3-l3 h2-h8", "h2-h8"), B("i7-h7", "i7-h7"), W("f3-l3", "f3-l3"),
                   B("k4-k3", "k4-k3", "c3-k3")};
        t.post.clear = {lane("g8", "m8"), lane("l2", "l9")};
        v.push_back(t);
    }
    const std::vector<InstanceSpec> and_parts = {at("wire", "identity", 0, 5), at("wire", "transpose", 4, 0),
                                                 at("and", "transpose", 5, 5), at("wire", "identity", 11, 9)};
    {
        auto t = base("and_wires_both", "15-16", "AND with both inputs activated", 15, 14, and_parts,
                      "c1P a3P", Wh);
        t.plies = {W("a3-h3 c1-c9", "c1-c9", "h9-c9"), B("d8-c8", "d8-c8"), W("a3-h3", "a3-h3"), B("g4-g3", "g4-g3"),
                   W("h1-h7", "h1-h7"),       B("i8-h8", "i8-h8"), W("a9-h9", "a9-h9"), B("n8-h8", "n8-h8"),
                   W("n6-n13", "n6-n13"),     B("o12-n12", "o12-n12")};
        t.post.clear = {lane("m13", "o13")};
        v.push_back(t);
    }
    {
        auto t = base("and_wires_first_only", "15-16", "AND with only its first input activated", 15, 14,
                      and_parts, "a3P", Wh);
        t.plies = {W("a3-h3", "a3-h3", "h9-c9"), B("g4-g3", "g4-g3"), W("h1-h7", "h1-h7", "h9-c9"),
                   B("i8-h8", "i8-h8")};
        t.post.quiet = {Wh};
        t.post.blocked = {lane("n7", "n13")};
        v.push_back(t);
    }
    const std::vector<InstanceSpec> choice_parts = {at("wire"), at("choice", "transpose", 5, 0),
                                                    at("wire", "identity", 5, 4),
                                                    at("wire", "transpose", 10, 1)};
    {
        auto t = base("choice_wires_up", "17-18", "choice stops, then exits upward", 15, 9, choice_parts,
                      "c1P", Wh);
        t.plies = {W("c1-c4", "c1-c4"),         B("d3-c3", "d3-c3"),        W("a4-h4 a4-n4", "a4-h4"),
                   B("g3-h3 i3-h3", "g3-h3"),   W("h4-h8 h4-n4", "h4-h8"),  B("i7-h7", "i7-h7", "h3-h7")};
        t.post.clear = {lane("g8", "o8")};
        v.push_back(t);
    }
    {
        auto t = base("choice_wires_right", "17-18", "choice stops, then exits to the right", 15, 9,
                      choice_parts, "c1P", Wh);
        t.plies = {W("c1-c4", "c1-c4"),       B("d3-c3", "d3-c3"),       W("a4-h4 a4-n4", "a4-h4"),
                   B("g3-h3 i3-h3", "g3-h3"), W("h4-h8 h4-n4", "h4-n4"), B("m5-m4", "m5-m4")};
        t.post.clear = {lane("n3", "n9")};
        v.push_back(t);
    }
    const std::vector<InstanceSpec> or_parts = {at("wire", "identity", 0, 4), at("wire", "transpose", 3, 0),
                                                at("or", "identity", 4, 4), at("wire", "transpose", 9, 10)};
    {
        auto t = base("or_wires_lower", "19-20", "OR activated through the lower input", 14, 14, or_parts,
                      "a3P", Wh);
        t.plies = {W("a3-g3", "a3-g3"),     B("f4-f3", "f4-f3"),     W("g1-g8", "g1-g8"),
                   B("h13-h8", "h13-h8"),   W("f13-m13", "f13-m13", "g8-c8"), B("l14-l13", "l14-l13", "b8-f8 f3-f8")};
        t.post.clear = {lane("m12", "m14")};
        v.push_back(t);
    }
    {
        auto t = base("or_wires_left", "21", "OR activated through the left input", 14, 14, or_parts, "c1P",
                      Wh);
        t.plies = {W("c1-c8", "c1-c8"),     B("d7-c7", "d7-c7"),     W("a8-g8", "a8-g8"),
                   B("h13-h8", "h13-h8"),   W("f13-m13", "f13-m13", "g8-g3"), B("l14-l13", "l14-l13", "f4-f8")};
        t.post.clear = {lane("m12", "m14")};
        v.push_back(t);
    }
    {
        auto t = base("or_wires_both", "19-21", "OR with the second input arriving after the first", 14, 14,
                      or_parts, "a3P c1P", Wh);
        t.plies = {W("a3-g3 c1-c8", "a3-g3"), B("f4-f3", "f4-f3"),   W("c1-c8 g1-g8", "g1-g8"),
                   B("h13-h8", "h13-h8"),     W("c1-c8 f13-m13", "f13-m13", "g8-c8"), B("l14-l13", "l14-l13", "b8-f8 f3-f8"),
                   W("c1-c8", "c1-c8", "g8-c8"), B("d7-c7", "d7-c7", "f3-f8")};
        t.post.quiet = {Wh};
        t.post.clear = {lane("m12", "m14")};
        v.push_back(t);
    }
    return v;
}

}  // namespace

const GadgetTemplate& Catalog::find_template(const std::string& name) const {
    for (const auto& t : templates)
        if (t.name == name) return t;
    throw std::out_of_range("no gadget template named " + name);
}

const GadgetTrace* Catalog::find_trace(const std::string& name) const {
    for (const auto& t : template_traces)
        if (t.name == name) return &t;
    for (const auto& t : appendix_traces)
        if (t.name == name) return &t;
    return nullptr;
}

const Catalog& catalog() {
    static const Catalog c{make_templates(), make_template_traces(), make_appendix_traces()};
    return c;
}

const GadgetTemplate& find_template(const std::string& name) { return catalog().find_template(name); }

// ---------------------------------------------------------------------------
// Verification

GameState build_position(const GadgetTrace& trace, std::vector<Instance>* instances) {
    bool has_king = false;
    for (const auto& spec : trace.instances)
        for (const auto& p : find_template(spec.template_name).pieces) has_king |= p.cell == Cell::King;
    GameState st(BoardGeometry(trace.width, trace.height, std::nullopt, trace.havens), RuleConfig{},
                 trace.first_mover, !has_king);
    for (const auto& spec : trace.instances) {
        Instance inst = instantiate(find_template(spec.template_name), spec.transform, st, spec.swap_colors);
        if (instances) instances->push_back(std::move(inst));
    }
    for (const PlacedPiece& p : trace.extras) {
        if (st.at(p.square) != Cell::Empty)
            throw OverlapError("entry soldier on occupied square " + square_name(p.square));
        st.place(p.square, *piece_of(p.cell));
    }
    st.set_to_move(trace.first_mover);
    return st;
}

namespace {

bool has_forcing_move(const GameState& st, Side side) {
    GameState s = st;
    if (s.to_move() != side) s.set_to_move(side);
    for (const auto& m : scored_legal_moves(s))
        if (!m.result.captures.empty() || m.result.terminal != Terminal::None) return true;
    return false;
}

std::vector<Move> merged(std::vector<Move> a, const std::vector<Move>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
}

std::string move_list(const std::vector<Move>& ms) {
    std::string out = "{";
    for (std::size_t i = 0; i < ms.size(); ++i) out += (i ? ", " : "") + move_name(ms[i]);
    return out + "}";
}

}  // namespace

TraceReport verify_trace(const GadgetTrace& trace) {
    TraceReport rep;
    rep.name = trace.name;
    auto fail = [&](const std::string& msg) {
        rep.pass = false;
        rep.failures.push_back(msg);
    };

    GameState st = [&] {
        try {
            return build_position(trace);
        } catch (const std::exception& e) {
            fail(std::string("cannot build position: ") + e.what());
            return GameState(BoardGeometry(1, 1), RuleConfig{}, Side::Attacker, true);
        }
    }();
    if (!rep.pass) return rep;

    for (std::size_t i = 0; i < trace.plies.size(); ++i) {
        const ScriptedPly& ply = trace.plies[i];
        PlyReport pr;
        pr.index = static_cast<int>(i);
        pr.mover = ply.mover;
        pr.expected = ply.expected;
        pr.unlisted = ply.unlisted;
        if (terminal_status(st) != Terminal::None) {
            pr.ok = false;
            pr.note = std::string("game already over: ") + terminal_name(terminal_status(st));
        } else if (st.to_move() != ply.mover) {
            pr.ok = false;
            pr.note = std::string("expected ") + side_name(ply.mover) + " to move";
        } else if (ply.pass) {
            pr.ok = !has_forcing_move(st, ply.mover);
            if (!pr.ok) {
                pr.observed = legal_moves(st);
                pr.note = "mover was expected to play elsewhere but has forcing moves";
            }
        } else {
            pr.observed = legal_moves(st);
            std::sort(pr.observed.begin(), pr.observed.end());
            if (!forced_active(st)) {
                pr.ok = false;
                pr.note = "no forced move: the mover is free";
            } else if (pr.observed != merged(ply.expected, ply.unlisted)) {
                pr.ok = false;
                pr.note = "forced set differs";
            } else if (!ply.chosen ||
                       std::find(ply.expected.begin(), ply.expected.end(), *ply.chosen) == ply.expected.end()) {
                pr.ok = false;
                pr.note = "chosen move outside the expected set";
            }
        }
        rep.unlisted += static_cast<int>(ply.unlisted.size());
        rep.plies.push_back(pr);
        if (!pr.ok) {
            rep.first_divergence = pr.index;
            fail("ply " + std::to_string(i) + " (" + side_name(ply.mover) + "): " + pr.note + "; expected " +
                 move_list(merged(pr.expected, pr.unlisted)) + ", observed " + move_list(pr.observed));
            return rep;
        }
        if (ply.pass) st.set_to_move(opponent(st.to_move()));
        else st = apply_move(st, *ply.chosen).first;
    }

    const Postcondition& post = trace.post;
    for (const Lane& l : post.clear)
        for (const Square& s : l.squares())
            if (!st.geometry().on_board(s) || st.at(s) != Cell::Empty || st.geometry().is_throne(s))
                fail("exit lane " + square_name(l.from) + "-" + square_name(l.to) + " obstructed at " +
                     square_name(s));
    for (const Lane& l : post.blocked) {
        bool any = false;
        for (const Square& s : l.squares()) any |= st.at(s) != Cell::Empty;
        if (!any) fail("lane " + square_name(l.from) + "-" + square_name(l.to) + " expected blocked but is clear");
    }
    for (const auto& [side, l] : post.no_entry) {
        GameState s = st;
        if (s.to_move() != side) s.set_to_move(side);
        const auto lane_sq = l.squares();
        for (const Move& m : pseudo_legal_moves(s)) {
            Lane path{m.from, m.to};
            for (const Square& p : path.squares()) {
                if (p == m.from) continue;
                if (std::find(lane_sq.begin(), lane_sq.end(), p) != lane_sq.end())
                    fail(std::string(side_name(side)) + " move " + move_name(m) + " reaches lane " +
                         square_name(l.from) + "-" + square_name(l.to));
            }
        }
    }
    for (Side side : post.quiet)
        if (has_forcing_move(st, side)) fail(std::string(side_name(side)) + " unexpectedly has a forcing move");
    if (post.terminal && terminal_status(st) != *post.terminal)
        fail(std::string("terminal status ") + terminal_name(terminal_status(st)) + ", expected " +
             terminal_name(*post.terminal));
    if (post.solver) {
        const Outcome o = solve(st, SearchLimits{post.solver->max_plies, std::nullopt, std::nullopt});
        if (o.verdict != post.solver->verdict)
            fail(std::string("solver verdict ") + verdict_name(o.verdict) + ", expected " +
                 verdict_name(post.solver->verdict) + " within " + std::to_string(post.solver->max_plies) +
                 " plies");
    }
    return rep;
}

std::string TraceReport::text() const {
    std::ostringstream os;
    os << name << ": " << (pass ? "PASS" : "FAIL") << '\n';
    for (const PlyReport& p : plies) {
        os << "  ply " << p.index << ' ' << side_name(p.mover) << ' ' << (p.ok ? "ok" : "DIVERGED") << "  "
           << (p.expected.empty() ? std::string("(plays elsewhere)") : move_list(p.expected));
        if (!p.unlisted.empty()) os << "  unlisted " << move_list(p.unlisted);
        if (!p.ok) os << "  observed " << move_list(p.observed) << "  " << p.note;
        os << '\n';
    }
    for (const auto& f : failures) os << "  failure: " << f << '\n';
    return os.str();
}

GadgetTrace transform_trace(const GadgetTrace& trace, const Transform& tf) {
    GadgetTrace out = trace;
    const Square p = tf.apply(Square{0, 0});
    const Square q = tf.apply(Square{trace.width - 1, trace.height - 1});
    if (std::min(p.col, q.col) < 0 || std::min(p.row, q.row) < 0)
        throw std::invalid_argument("transform moves the board below the origin");
    out.width = std::max(p.col, q.col) + 1;
    out.height = std::max(p.row, q.row) + 1;
    for (Square& h : out.havens) h = tf.apply(h);
    for (InstanceSpec& s : out.instances) s.transform = tf.compose(s.transform);
    for (PlacedPiece& pp : out.extras) pp.square = tf.apply(pp.square);
    for (ScriptedPly& ply : out.plies) {
        for (Move& m : ply.expected) m = tf.apply(m);
        for (Move& m : ply.unlisted) m = tf.apply(m);
        std::sort(ply.expected.begin(), ply.expected.end());
        std::sort(ply.unlisted.begin(), ply.unlisted.end());
        if (ply.chosen) ply.chosen = tf.apply(*ply.chosen);
    }
    auto map_lane = [&](Lane& l) {
        l.from = tf.apply(l.from);
        l.to = tf.apply(l.to);
    };
    for (Lane& l : out.post.clear) map_lane(l);
    for (Lane& l : out.post.blocked) map_lane(l);
    for (auto& e : out.post.no_entry) map_lane(e.second);
    out.name = trace.name + "@" + tf.name();
    return out;
}

std::string template_text(const GadgetTemplate& t) {
    std::ostringstream os;
    os << "template " << t.name << ' ' << t.width << 'x' << t.height << '\n';
    for (const PlacedPiece& p : t.pieces)
        os << "piece " << square_name(p.square) << ' '
           << (p.cell == Cell::AttackerSoldier ? 'p' : p.cell == Cell::DefenderSoldier ? 'P' : 'K') << '\n';
    for (const Port& p : t.ports)
        os << "port " << p.name << ' ' << (p.inbound ? "inbound " : "outbound ") << square_name(p.entry) << ' '
           << dir_name(p.direction) << '\n';
    if (t.haven) os << "haven " << square_name(*t.haven) << '\n';
    return os.str();
}

std::string trace_text(const GadgetTrace& t) {
    std::ostringstream os;
    os << "trace " << t.name << " figure " << t.figure << ' ' << t.width << 'x' << t.height << '\n';
    for (const InstanceSpec& s : t.instances)
        os << "instance " << s.template_name << ' ' << s.transform.name() << (s.swap_colors ? " swapped" : "")
           << '\n';
    for (const Square& h : t.havens) os << "haven " << square_name(h) << '\n';
    for (const PlacedPiece& p : t.extras)
        os << "entry-soldier " << square_name(p.square) << ' ' << (p.cell == Cell::AttackerSoldier ? 'p' : 'P')
           << '\n';
    for (const ScriptedPly& p : t.plies) {
        os << "ply " << side_name(p.mover);
        if (p.pass) {
            os << " elsewhere\n";
            continue;
        }
        os << " expect";
        for (const Move& m : p.expected) os << ' ' << move_name(m);
        os << " play " << move_name(*p.chosen);
        if (!p.unlisted.empty()) {
            os << " unlisted";
            for (const Move& m : p.unlisted) os << ' ' << move_name(m);
        }
        os << '\n';
    }
    for (const Lane& l : t.post.clear) os << "clear " << square_name(l.from) << '-' << square_name(l.to) << '\n';
    for (const Lane& l : t.post.blocked)
        os << "blocked " << square_name(l.from) << '-' << square_name(l.to) << '\n';
    for (const auto& [side, l] : t.post.no_entry)
        os << "no-entry " << side_name(side) << ' ' << square_name(l.from) << '-' << square_name(l.to) << '\n';
    for (Side s : t.post.quiet) os << "quiet " << side_name(s) << '\n';
    if (t.post.terminal) os << "terminal " << terminal_name(*t.post.terminal) << '\n';
    if (t.post.solver)
        os << "solver " << verdict_name(t.post.solver->verdict) << " within " << t.post.solver->max_plies << '\n';
    return os.str();
}

}  // namespace tafl::gadgets
