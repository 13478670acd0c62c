#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tafl/notation.hpp"
#include "tafl/rules.hpp"

using namespace tafl;

namespace {

const char* kBrandubh = "7x7 3p3/3p3/3P3/ppPKPpp/3P3/3p3/3p3 a d4 a1,a7,g1,g7";

// Column of the first occurrence of `needle` in `text`, 1-based.
int column_of(const std::string& text, const std::string& needle) {
    const auto at = text.find(needle);
    EXPECT_NE(at, std::string::npos);
    return static_cast<int>(at) + 1;
}

void expect_parse_error(const std::string& fen, int column, const std::string& fragment) {
    try {
        parse_fen(fen);
        ADD_FAILURE() << "accepted " << fen;
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1) << fen;
        EXPECT_EQ(e.column(), column) << fen << ": " << e.what();
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Notation, SquareAndMoveNames) {
    EXPECT_EQ(square_name({0, 0}), "a1");
    EXPECT_EQ(square_name({6, 6}), "g7");
    EXPECT_EQ(square_name({1, 11}), "b12");
    EXPECT_EQ(parse_square("b12"), (Square{1, 11}));
    EXPECT_EQ(parse_move("b4-b7"), (Move{{1, 3}, {1, 6}}));
    EXPECT_EQ(parse_move("b4b7"), parse_move("b4-b7"));
    EXPECT_EQ(move_name(parse_move("c1-c4")), "c1-c4");
    EXPECT_THROW(parse_square("a0"), ParseError);
    EXPECT_THROW(parse_square("4a"), ParseError);
    EXPECT_THROW(parse_move("b4"), ParseError);
}

TEST(Notation, ColumnsPastZContinueWithTwoLetters) {
    EXPECT_EQ(column_name(0), "a");
    EXPECT_EQ(column_name(25), "z");
    EXPECT_EQ(column_name(26), "aa");
    EXPECT_EQ(column_name(27), "ab");
    EXPECT_EQ(column_name(51), "az");
    EXPECT_EQ(column_name(52), "ba");
    EXPECT_EQ(column_name(kMaxBoardWidth - 1), "zz");
    for (int c = 0; c < kMaxBoardWidth; ++c) {
        const Square s{c, 30};
        ASSERT_EQ(parse_square(square_name(s)), s) << c;
    }
}

TEST(Notation, BrandubhString) {
    const GameState st = brandubh();
    EXPECT_EQ(emit_fen(st), kBrandubh);
    EXPECT_EQ(parse_fen(kBrandubh), st);
    EXPECT_EQ(st.count(Side::Attacker), 8);
    EXPECT_EQ(st.count(Side::Defender), 5);
    EXPECT_EQ(st.king(), parse_square("d4"));
    EXPECT_EQ(st.to_move(), Side::Attacker);
    EXPECT_FALSE(st.fragment_mode());
}

TEST(Notation, KinglessBoardsDefaultToFragmentMode) {
    EXPECT_TRUE(parse_fen("3x3 3/1p1/3 a - -").fragment_mode());
    EXPECT_FALSE(parse_fen("3x3 3/1p1/3 a - - N").fragment_mode());
    EXPECT_TRUE(parse_fen("3x3 3/1K1/p2 a - - F").fragment_mode());
    EXPECT_TRUE(parse_fen("7x7 7/7/7/7/7/K6/p6 a d4 - T").king_left_throne());
}

TEST(Notation, MultiDigitRuns) {
    const GameState st = parse_fen("15x3 p13P/15/7K7 d - -");
    EXPECT_EQ(st.at(parse_square("a3")), Cell::AttackerSoldier);
    EXPECT_EQ(st.at(parse_square("o3")), Cell::DefenderSoldier);
    EXPECT_EQ(st.at(parse_square("h1")), Cell::King);
    EXPECT_EQ(emit_fen(st), "15x3 p13P/15/7K7 d - -");
}

TEST(Notation, ParseErrorsCarryTheColumn) {
    const std::string bad_char = "7x7 3p3/3p3/3P3/ppPKXpp/3P3/3p3/3p3 a d4 a1,a7,g1,g7";
    expect_parse_error(bad_char, column_of(bad_char, "X"), "unexpected character");
    const std::string long_row = "7x7 3p3/3p3/3P3/ppPKPppp/3P3/3p3/3p3 a d4 a1,a7,g1,g7";
    expect_parse_error(long_row, column_of(long_row, "ppPKPppp") + 7, "past width");
    const std::string mover = "7x7 3p3/3p3/3P3/ppPKPpp/3P3/3p3/3p3 x d4 a1,a7,g1,g7";
    expect_parse_error(mover, column_of(mover, " x ") + 1, "mover");
    const std::string haven = "7x7 3p3/3p3/3P3/ppPKPpp/3P3/3p3/3p3 a d4 a1,a9";
    expect_parse_error(haven, column_of(haven, "a9"), "haven off the board");
    const std::string kings = "3x3 K1K/3/3 a - -";
    expect_parse_error(kings, 7, "two Kings");
    const std::string zero = "9x1 p08 a - -";
    expect_parse_error(zero, column_of(zero, "0"), "leading zero");
    expect_parse_error("7y7 7/7/7/7/7/7/7 a - -", 1, "<W>x<H>");
    expect_parse_error("3x3 3/1p1/3 a - - FN", column_of("3x3 3/1p1/3 a - - FN", "FN"), "conflict");
}

TEST(Notation, ShortRowsAreRejected) {
    EXPECT_THROW(parse_fen("3x3 2/3/3 a - -"), ParseError);
    EXPECT_THROW(parse_fen("3x3 3/3 a - -"), ParseError);
    EXPECT_THROW(parse_fen("3x3 p2/3/3/3 a - -"), ParseError);
    EXPECT_THROW(parse_fen("3x3 3/1p1/3 a b2 -"), ParseError);  // soldier on the throne
}

TEST(Notation, RandomRoundTrip) {
    std::mt19937_64 rng(17);
    tafl::testing::RandomSpec spec;
    spec.max_side = 15;
    spec.any_havens = true;
    int wide = 0;
    for (int i = 0; i < 1000; ++i) {
        GameState st = tafl::testing::random_position(rng, spec);
        if (st.king() && st.geometry().throne() && !(*st.king() == *st.geometry().throne()) && (i % 2))
            st.set_king_left_throne(true);
        const std::string fen = emit_fen(st);
        const GameState back = parse_fen(fen, st.config());
        ASSERT_EQ(emit_fen(back), fen);
        ASSERT_EQ(back.cells(), st.cells()) << fen;
        ASSERT_EQ(back.to_move(), st.to_move()) << fen;
        ASSERT_EQ(back.fragment_mode(), st.fragment_mode()) << fen;
        ASSERT_EQ(back.king_left_throne(), st.king_left_throne()) << fen;
        ASSERT_EQ(back.hash(), st.hash()) << fen;
        ASSERT_EQ(back.geometry().throne(), st.geometry().throne()) << fen;
        auto h1 = back.geometry().havens();
        auto h2 = st.geometry().havens();
        std::sort(h1.begin(), h1.end());
        std::sort(h2.begin(), h2.end());
        ASSERT_EQ(h1, h2) << fen;
        wide += st.geometry().width() >= 10;
    }
    EXPECT_GT(wide, 200);
}

TEST(Notation, RoundTripAlongPlayedGames) {
    std::mt19937_64 rng(5);
    GameState st = brandubh();
    for (int ply = 0; ply < 60 && terminal_status(st) == Terminal::None; ++ply) {
        const auto ms = legal_moves(st);
        st = apply_move(st, ms[rng() % ms.size()]).first;
        const GameState back = parse_fen(emit_fen(st));
        ASSERT_EQ(back.cells(), st.cells());
        ASSERT_EQ(back.king_left_throne(), st.king_left_throne());
        ASSERT_EQ(back.hash(), st.hash());
    }
}

TEST(Notation, RenderBoardLabelsRowsAndColumns) {
    const std::string text = render_board(brandubh());
    EXPECT_NE(text.find(" 7 "), std::string::npos);
    EXPECT_NE(text.find("a b c d e f g"), std::string::npos);
    const std::string wide = render_board(parse_fen("28x1 p26P a - -"));
    EXPECT_NE(wide.find('a'), std::string::npos);
    EXPECT_NE(wide.find("a"), wide.rfind("a"));  // the second header line repeats letters
}
