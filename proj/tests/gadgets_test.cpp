#include <gtest/gtest.h>

#include <map>

#include "tafl/gadgets.hpp"
#include "tafl/notation.hpp"
#include "tafl/rules.hpp"
#include "tafl/solver.hpp"

using namespace tafl;
using namespace tafl::gadgets;

namespace {

std::string rows_of(const GameState& st) {
    const std::string fen = emit_fen(st);
    const auto a = fen.find(' ') + 1;
    return fen.substr(a, fen.find(' ', a) - a);
}

// Boards along the scripted line. Each step is listed twice: as played, and
// with entry soldiers that have not moved yet taken off, since the figures
// often leave those out.
std::vector<std::pair<std::string, std::string>> boards_along(const GadgetTrace& t) {
    GameState st = build_position(t);
    std::vector<Square> waiting;
    for (const PlacedPiece& e : t.extras) waiting.push_back(e.square);
    auto bare = [&](GameState s) {
        for (const Square& w : waiting) s.remove(w);
        return rows_of(s);
    };
    std::vector<std::pair<std::string, std::string>> out{{rows_of(st), bare(st)}};
    for (const ScriptedPly& p : t.plies) {
        if (p.pass) {
            st.set_to_move(opponent(st.to_move()));
            continue;
        }
        std::erase(waiting, p.chosen->from);
        st = apply_move(st, *p.chosen).first;
        out.push_back({rows_of(st), bare(st)});
    }
    return out;
}

// Figure diagrams may drop trailing empty rows; fill them back in.
std::string pad_rows(std::string rows, int width, int height) {
    const int n = static_cast<int>(std::count(rows.begin(), rows.end(), '/')) + 1;
    for (int i = n; i < height; ++i) rows += "/" + std::to_string(width);
    return rows;
}

// Diagram rows from the figures, in the order they are drawn. Frames that show
// a soldier after it has left the fragment are not listed; the last two
// frames of the two-wire figure hold a 10-square row on a 9-wide board and are
// also left out.
const std::vector<std::pair<std::string, std::vector<std::string>>> kFigureFrames = {
    {"wire",
     {"2p1/Pp2/3p/4/4",
      "2p1/P1P1/3p/4/4",
      "2p1/P3/2p1/4/4"}},
    {"wire_diode",
     {"2p1/Pp2/3p/4/4",
      "2p1/P1P1/3p/4/4",
      "2p1/P3/2p1/4/4"}},
    {"defender_victory_active",
     {"1PPp1/p1K2/2p1p/1p1pP/5/5/5"}},
    {"attacker_victory_active",
     {"p2P1/K4/1PPpp/4P/5/3P1/3p1"}},
    {"variable_white",
     {"p1Pp1P/3P2",
      "p1P1P1/3P2"}},
    {"variable_black",
     {"p1Pp1P/3P2",
      "1p1p1P/3P2"}},
    {"fanout",
     {"1p2/2pP/p3/2P1/4"}},
    {"choice",
     {"P5/1p4/2p3/pPp3/2p3/6"}},
    {"and_both",
     {"P1p2/5/5/5/3p1/2p2/2pPp/5/2P2"}},
    {"or_column",
     {"1P1p2/6/6/6/6/3pPp/6/3P2"}},
    {"wire_wire",
     {"9/2p3p2/Pp6p/3p3p1/7P1/9",
      "9/2p3p2/P1P5p/3p3p1/7P1/9",
      "9/2p3p2/P7p/2p4p1/7P1/9",
      "9/2p3p2/7Pp/2p6/7P1/9"}},
    {"wire_defender_victory",
     {"5Pp2/2p2p2p/Pp4pKP/3p1p2P/7p1/9",
      "5Pp2/2p2p2p/P1P3pKP/3p1p2P/7p1/9",
      "5Pp2/2p2p2p/P5pKP/2p2p2P/7p1/9",
      "5Pp2/2p5p/5P1KP/2p2p2P/7p1/9",
      "5Pp2/2p2p3/7KP/2p2p2P/7p1/9",
      "5P1K1/2p2p3/8P/2p2p2P/7p1/9"}},
    {"wire_attacker_victory",
     {"8Pp2/5pP2p1P/9P2/2P6P2/pP8Kp/3P8/12",
      "8Pp2/5pP2p1P/9P2/2P6P2/p1p7Kp/3P8/12",
      "8Pp2/5pP2p1P/9P2/2P6P2/p9Kp/2P9/12",
      "8Pp2/5pP2p1P/9P2/2P6P2/9p1p/2P9/12"}},
    {"variable_wire_black",
     {"1p4/6/1P1p2/Pp3p/4p1/1P2P1",
      "6/1p4/3p2/Pp3p/4p1/1P2P1"}},
    {"variable_wire_white",
     {"1p4/6/1P1p2/Pp3p/4p1/1P2P1",
      "1p4/6/1P1p2/P4p/1P2p1/4P1",
      "1p4/6/1P1p2/4Pp/1P4/4P1",
      "1p4/6/1P4/3p1p/1P4/4P1"}},
    {"fanout_wires",
     {"7p5/5Pp6/8p4/13/2p3p6/Pp6p1p2/3p1P1p4p/7P3p1/11P1",
      "7p5/5Pp6/8p4/13/2p3p6/P1P5p1p2/3p1P1p4p/7P3p1/11P1",
      "7p5/5Pp6/8p4/13/2p3p6/P7p1p2/2p2P1p4p/7P3p1/11P1",
      "7p5/5Pp6/8p4/13/2p3p6/7Pp1p2/2p2P6p/7P3p1/11P1",
      "7p5/5Pp6/8p4/13/2p10/6p1p1p2/2p2P6p/7P3p1/11P1",
      "7p5/5P1P5/8p4/13/2p10/6p1p1p2/2p2P6p/11p1/11P1",
      "7p5/5P7/7p5/13/2p10/6p1p1p2/2p2P6p/11p1/11P1"}},
    {"and_wires_both",
     {"13p1/11Pp2/14p/15/2p4p7/Pp5P1p5/3p1P1pp4p1/15/13P1/15/6p8/8p6/7p7/7P7",
      "13p1/11Pp2/14p/15/2p4p7/P1P4P1p5/3p1P1pp4p1/15/13P1/15/6p8/8p6/7p7/7P7",
      "13p1/11Pp2/14p/15/2p4p7/P6P1p5/2p2P1pp4p1/15/13P1/15/6p8/8p6/7p7/7P7",
      "13p1/11Pp2/14p/15/2p4p7/P6P1p5/2p2P1pp4p1/15/13P1/15/6p8/7Pp6/15/7P7",
      "13p1/11Pp2/14p/15/2p4p7/P6P1p5/2p2P1pp4p1/15/13P1/15/15/6p1p6/15/7P7",
      "13p1/11Pp2/14p/15/2p4p7/P6P1p5/2p2P2p4p1/7P7/13P1/15/15/6p1p6/15/15",
      "13p1/11Pp2/14p/15/2p4p7/P8p5/2p2P1p5p1/7P7/13P1/15/15/6p1p6/15/15",
      "13p1/11Pp2/14p/15/2p4p7/7P1p5/2p2P7p1/7P7/13P1/15/15/6p1p6/15/15",
      "13p1/11Pp2/14p/15/2p4p7/9p5/2p2P1p7/7P7/13P1/15/15/6p1p6/15/15"}},
    {"choice_wires_up",
     {"7p7/5Pp8/8p6/15/2p9p2/Pp12p/3p2ppp4p1/7P1p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/P1P11p/3p2ppp4p1/7P1p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/P13p/2p3ppp4p1/7P1p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/7P6p/2p3p1p4p1/7P1p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/7P6p/2p4pp4p1/9p3P1/7p2P4",
      "7p7/5P1P7/8p6/15/2p9p2/14p/2p4pp4p1/9p3P1/7p2P4",
      "7p7/5P9/7p7/15/2p9p2/14p/2p4pp4p1/9p3P1/7p2P4"}},
    {"choice_wires_right",
     {"7p7/5Pp8/8p6/15/2p9p2/Pp12p/3p2ppp4p1/7P1p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/P1P11p/3p2ppp4p1/7P1p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/P13p/2p3ppp4p1/7P1p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/7P6p/2p3p1p4p1/7P1p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/7P6p/2p4pp4p1/9p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p9p2/13Pp/2p4pp6/9p3P1/7p2P4",
      "7p7/5Pp8/8p6/15/2p12/12p1p/2p4pp6/9p3P1/7p2P4"}},
    {"or_wires_lower",
     {"11p2/5P1p5p/12p1/12P1/14/2p11/Pp5pPp4/3p10/7P6/14/5p8/7p6/6p7/6P7",
      "11p2/5P1p5p/12p1/12P1/14/2p11/Pp5pPp4/3p10/7P6/14/5p8/6Pp6/14/6P7",
      "11p2/5P1p5p/12p1/12P1/14/2p11/Pp5pPp4/3p10/7P6/14/14/5p1p6/14/6P7",
      "11p2/5P1p5p/12p1/12P1/14/2p11/Pp4P1Pp4/3p10/7P6/14/14/5p1p6/14/14",
      "11p2/5P7p/12p1/12P1/14/2p11/Pp4Pp1p4/3p10/7P6/14/14/5p1p6/14/14",
      "11p2/12Pp/14/12P1/14/2p11/Pp4Pp1p4/3p10/7P6/14/14/5p1p6/14/14",
      "14/11p1p/14/12P1/14/2p11/Pp4Pp1p4/3p10/7P6/14/14/5p1p6/14/14"}},
    {"or_wires_left",
     {"11p2/5P1p5p/12p1/12P1/14/2p11/P1P4pPp4/3p10/7P6/14/5p8/7p6/6p7/6P7",
      "11p2/5P1p5p/12p1/12P1/14/2p11/P6pPp4/2p11/7P6/14/5p8/7p6/6p7/6P7",
      "11p2/5P1p5p/12p1/12P1/14/2p11/6P1Pp4/2p11/7P6/14/5p8/7p6/6p7/6P7",
      "11p2/5P7p/12p1/12P1/14/2p11/6Pp1p4/2p11/7P6/14/5p8/7p6/6p7/6P7",
      "11p2/12Pp/14/12P1/14/2p11/6Pp1p4/2p11/7P6/14/5p8/7p6/6p7/6P7",
      "14/11p1p/14/12P1/14/2p11/6Pp1p4/2p11/7P6/14/5p8/7p6/6p7/6P7"}},
    {"or_wires_both",
     {"11p2/5P1p5p/12p1/12P1/14/2p11/Pp5pPp4/3p10/7P6/14/5p8/6Pp6/14/6P7",
      "11p2/5P1p5p/12p1/12P1/14/2p11/Pp5pPp4/3p10/7P6/14/14/5p1p6/14/6P7",
      "11p2/5P1p5p/12p1/12P1/14/2p11/Pp4P1Pp4/3p10/7P6/14/14/5p1p6/14/14",
      "11p2/5P7p/12p1/12P1/14/2p11/Pp4Pp1p4/3p10/7P6/14/14/5p1p6/14/14",
      "11p2/12Pp/14/12P1/14/2p11/Pp4Pp1p4/3p10/7P6/14/14/5p1p6/14/14",
      "14/11p1p/14/12P1/14/2p11/Pp4Pp1p4/3p10/7P6/14/14/5p1p6/14/14"}},
};

std::vector<Move> sorted(std::vector<Move> v) {
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<const GadgetTrace*> all_traces() {
    std::vector<const GadgetTrace*> out;
    for (const auto& t : catalog().template_traces) out.push_back(&t);
    for (const auto& t : catalog().appendix_traces) out.push_back(&t);
    return out;
}

GameState start_of(const std::string& trace) {
    const GadgetTrace* t = catalog().find_trace(trace);
    EXPECT_NE(t, nullptr) << trace;
    return build_position(*t);
}

}  // namespace

TEST(Catalog, HoldsEveryTemplateAndTrace) {
    EXPECT_EQ(catalog().templates.size(), 9u);
    EXPECT_EQ(catalog().template_traces.size(), 17u);
    EXPECT_EQ(catalog().appendix_traces.size(), 13u);
    EXPECT_EQ(find_template("wire").width, 4);
    EXPECT_EQ(find_template("wire").height, 5);
    EXPECT_THROW(find_template("nand"), std::out_of_range);
    EXPECT_NE(template_text(find_template("wire")).find("port out outbound a4 right"), std::string::npos);
}

TEST(Catalog, EveryTracePasses) {
    for (const GadgetTrace* t : all_traces()) {
        const TraceReport r = verify_trace(*t);
        EXPECT_TRUE(r.pass) << r.text();
        EXPECT_FALSE(r.first_divergence) << t->name;
    }
}

TEST(Catalog, FramesMatchTheFigures) {
    for (const auto& [name, frames] : kFigureFrames) {
        const GadgetTrace* t = catalog().find_trace(name);
        ASSERT_NE(t, nullptr) << name;
        const auto boards = boards_along(*t);
        std::size_t at = 0;
        for (const std::string& raw : frames) {
            const std::string want = pad_rows(raw, t->width, t->height);
            while (at < boards.size() && boards[at].first != want && boards[at].second != want) ++at;
            ASSERT_LT(at, boards.size()) << name << ": frame " << want << " not reached in order";
        }
    }
}

TEST(Catalog, UnlistedAlternativesAreRealOptions) {
    int declared = 0;
    int plies = 0;
    for (const GadgetTrace* t : all_traces()) {
        const TraceReport r = verify_trace(*t);
        bool any = false;
        for (std::size_t i = 0; i < t->plies.size(); ++i) {
            plies += !t->plies[i].unlisted.empty();
            for (const Move& m : t->plies[i].unlisted) {
                ++declared;
                any = true;
                const auto& seen = r.plies.at(i).observed;
                EXPECT_NE(std::find(seen.begin(), seen.end(), m), seen.end()) << t->name << " ply " << i;
            }
        }
        if (!any) continue;
        // Without the declarations the exact-equality check must fail.
        GadgetTrace strict = *t;
        for (ScriptedPly& p : strict.plies) p.unlisted.clear();
        EXPECT_FALSE(verify_trace(strict).pass) << t->name;
    }
    EXPECT_EQ(declared, 21);
    EXPECT_EQ(plies, 19);
}

TEST(Catalog, WireDefenderVictoryDeclaresTheAlternativeHammer) {
    const GadgetTrace* t = catalog().find_trace("wire_defender_victory");
    ASSERT_NE(t, nullptr);
    bool found = false;
    for (const ScriptedPly& p : t->plies) {
        const auto all = sorted([&] {
            auto v = p.expected;
            v.insert(v.end(), p.unlisted.begin(), p.unlisted.end());
            return v;
        }());
        if (std::find(all.begin(), all.end(), parse_move("c5-f5")) != all.end() &&
            std::find(all.begin(), all.end(), parse_move("i5-f5")) != all.end())
            found = true;
    }
    EXPECT_TRUE(found);
}

TEST(Transforms, NamedOrientationsAreDistinctIsometries) {
    const auto& names = Transform::orientation_names();
    ASSERT_EQ(names.size(), 8u);
    for (std::size_t i = 0; i < names.size(); ++i) {
        const Transform t = Transform::named(names[i]);
        EXPECT_EQ(std::abs(t.a * t.d - t.b * t.c), 1) << names[i];
        for (std::size_t j = 0; j < i; ++j) EXPECT_NE(t, Transform::named(names[j]));
    }
    EXPECT_EQ(Transform::named("rot90").compose(Transform::named("rot270")), Transform::identity());
    EXPECT_EQ(Transform::named("transpose").apply(Square{1, 3}), (Square{3, 1}));
    EXPECT_EQ(Transform::named("transpose").apply(kRight), kUp);
    EXPECT_THROW(Transform::named("spin"), std::invalid_argument);
}

TEST(Transforms, TracesAreEquivariant) {
    for (const GadgetTrace* t : all_traces()) {
        const TraceReport base = verify_trace(*t);
        for (const std::string& o : Transform::orientation_names()) {
            const Transform tf = Transform::fit(o, t->width, t->height);
            const GadgetTrace moved = transform_trace(*t, tf);
            const TraceReport r = verify_trace(moved);
            ASSERT_TRUE(r.pass) << r.text();
            ASSERT_EQ(r.plies.size(), base.plies.size());
            for (std::size_t i = 0; i < r.plies.size(); ++i) {
                std::vector<Move> mapped;
                for (const Move& m : base.plies[i].observed) mapped.push_back(tf.apply(m));
                EXPECT_EQ(sorted(r.plies[i].observed), sorted(mapped)) << moved.name << " ply " << i;
            }
        }
    }
}

TEST(Instantiate, RejectsOverlapsAndMissingHavens) {
    GameState board(BoardGeometry(9, 9), RuleConfig{}, Side::Defender, true);
    const Instance w = instantiate(find_template("wire"), Transform::identity(), board);
    EXPECT_EQ(w.pieces.size(), 4u);
    EXPECT_EQ(board.at(parse_square("a4")), Cell::DefenderSoldier);
    EXPECT_THROW(instantiate(find_template("wire"), Transform::identity(), board), OverlapError);
    EXPECT_THROW(instantiate(find_template("wire"), Transform::translation(7, 0), board), OverlapError);
    EXPECT_THROW(instantiate(find_template("defender_victory"), Transform::translation(4, 0), board), AnchorError);

    GameState with_haven(BoardGeometry(5, 7, std::nullopt, {Square{4, 6}}), RuleConfig{}, Side::Defender, false);
    EXPECT_THROW(instantiate(find_template("defender_victory"), Transform::identity(), with_haven, true), AnchorError);
    EXPECT_NO_THROW(instantiate(find_template("defender_victory"), Transform::identity(), with_haven));
    EXPECT_EQ(with_haven.king(), parse_square("c6"));
}

TEST(Instantiate, ColourSwapAndPorts) {
    GameState board(BoardGeometry(6, 6), RuleConfig{}, Side::Attacker, true);
    const Instance w = instantiate(find_template("wire"), Transform::fit("transpose", 4, 5, 1, 1), board, true);
    EXPECT_TRUE(w.colors_swapped);
    EXPECT_EQ(w.port("in").direction, kRight);
    EXPECT_EQ(w.port("out").direction, kUp);
    // a4 of the template lands on d2 under the transpose, shifted by (1, 1).
    EXPECT_EQ(w.port("out").entry, parse_square("e2"));
    EXPECT_EQ(board.at(parse_square("e2")), Cell::AttackerSoldier);
    EXPECT_THROW(w.port("sideways"), std::out_of_range);
}

TEST(Diode, BackwardSignalCannotContinue) {
    const GadgetTrace* t = catalog().find_trace("wire_diode");
    ASSERT_NE(t, nullptr);
    EXPECT_TRUE(verify_trace(*t).pass);
    GameState st = build_position(*t);
    for (const ScriptedPly& p : t->plies) st = apply_move(st, *p.chosen).first;
    st.set_to_move(Side::Defender);
    // The upstream port line is column c below the capture square.
    for (const Move& m : pseudo_legal_moves(st)) {
        const bool touches = m.to.col == 2 && m.to.row <= 2;
        EXPECT_FALSE(touches) << move_name(m);
    }
    EXPECT_NE(st.at(parse_square("c3")), Cell::Empty);
}

TEST(Victory, DefenderVictoryActiveReachesTheHaven) {
    GameState st = start_of("defender_victory_active");
    st = apply_move(st, parse_move("c1-c4")).first;
    const Outcome o = solve(st, {6, std::nullopt, std::nullopt});
    EXPECT_EQ(o.verdict, Verdict::DefenderWin);
    ASSERT_FALSE(o.line.empty());
    // Black's forced capture, the King's capture to e6, any Black move, the escape.
    EXPECT_EQ(o.line.size(), 4u);
    EXPECT_EQ(o.line.front(), parse_move("d7-d4"));
    EXPECT_EQ(o.line[1], parse_move("c6-e6"));
    EXPECT_EQ(o.line.back(), parse_move("e6-e7"));
}

TEST(Victory, DefenderVictoryInactiveLoses) {
    const GameState st = start_of("defender_victory_inactive");
    ASSERT_EQ(st.to_move(), Side::Defender);
    const Outcome o = solve(st, {6, std::nullopt, std::nullopt});
    EXPECT_EQ(o.verdict, Verdict::AttackerWin);
    ASSERT_TRUE(o.plies);
    EXPECT_LE(*o.plies, 6);
}

TEST(Victory, AttackerVictoryActiveTakesTheKing) {
    auto [after, r] = apply_move(start_of("attacker_victory_active"), parse_move("a1-a5"));
    EXPECT_EQ(r.captures, std::vector<Square>{parse_square("a6")});
    EXPECT_EQ(r.terminal, Terminal::AttackerWin);
    EXPECT_FALSE(after.king());

    const Outcome o = solve(start_of("attacker_victory_active"), {1, std::nullopt, std::nullopt});
    EXPECT_EQ(o.verdict, Verdict::AttackerWin);
    EXPECT_EQ(o.plies, 1);
}

TEST(Victory, AttackerVictoryInactiveHasAFasterRefutation) {
    const GameState st = start_of("attacker_victory_inactive");
    const auto values = evaluate_moves(st, {3, std::nullopt, std::nullopt});
    std::map<std::string, MoveValue> by_name;
    for (const auto& v : values) by_name.emplace(move_name(v.move), v);
    ASSERT_EQ(by_name.size(), 2u);
    EXPECT_EQ(by_name.at("a7-c7").verdict, Verdict::AttackerWin);
    EXPECT_EQ(by_name.at("a7-c7").plies, 3);
    EXPECT_NE(by_name.at("d5-d3").verdict, Verdict::AttackerWin);
    GameState scripted = apply_move(st, parse_move("d5-d3")).first;
    const Outcome o = solve(scripted, {3, std::nullopt, std::nullopt});
    EXPECT_EQ(o.verdict, Verdict::DefenderWin);
}
