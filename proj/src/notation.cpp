#include "tafl/notation.hpp"

#include <cctype>
#include <sstream>
#include <vector>

namespace tafl {

ParseError::ParseError(int line, int column, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + msg),
      line_(line),
      column_(column) {}

namespace {

Square parse_square_at(std::string_view text, int line, int column) {
    std::size_t letters = 0;
    while (letters < text.size() && text[letters] >= 'a' && text[letters] <= 'z') ++letters;
    if (letters == 0 || letters > 2 || letters == text.size())
        throw ParseError(line, column, "bad square '" + std::string(text) + "'");
    int col = text[0] - 'a';
    if (letters == 2) col = (col + 1) * 26 + (text[1] - 'a');
    int row = 0;
    for (std::size_t i = letters; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i])))
            throw ParseError(line, column, "bad square '" + std::string(text) + "'");
        row = row * 10 + (text[i] - '0');
        if (row > 10000) throw ParseError(line, column, "row number too large");
    }
    if (row < 1 || text[letters] == '0') throw ParseError(line, column, "bad row in '" + std::string(text) + "'");
    return Square{col, row - 1};
}

struct Token {
    std::string_view text;
    int column;  // 1-based
};

std::vector<Token> split_ws(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        if (i >= s.size()) break;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        out.push_back({s.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

int parse_positive(std::string_view t, int column) {
    if (t.empty() || t.size() > 4) throw ParseError(1, column, "bad board dimension");
    int v = 0;
    for (char c : t) {
        if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError(1, column, "bad board dimension");
        v = v * 10 + (c - '0');
    }
    if (v <= 0) throw ParseError(1, column, "board dimension must be positive");
    return v;
}

}  // namespace

std::string column_name(int col) {
    if (col < 26) return std::string(1, static_cast<char>('a' + col));
    return std::string{static_cast<char>('a' + col / 26 - 1), static_cast<char>('a' + col % 26)};
}

std::string square_name(Square s) { return column_name(s.col) + std::to_string(s.row + 1); }

Square parse_square(std::string_view text) { return parse_square_at(text, 1, 1); }

std::string move_name(const Move& m) { return square_name(m.from) + "-" + square_name(m.to); }

Move parse_move(std::string_view text) {
    const auto dash = text.find('-');
    if (dash != std::string_view::npos)
        return Move{parse_square_at(text.substr(0, dash), 1, 1),
                    parse_square_at(text.substr(dash + 1), 1, static_cast<int>(dash) + 2)};
    // Without a separator the second square starts at the second letter.
    for (std::size_t i = 1; i < text.size(); ++i)
        if (std::isalpha(static_cast<unsigned char>(text[i])))
            return Move{parse_square_at(text.substr(0, i), 1, 1),
                        parse_square_at(text.substr(i), 1, static_cast<int>(i) + 1)};
    throw ParseError(1, 1, "bad move '" + std::string(text) + "'");
}

const char* side_name(Side s) { return s == Side::Attacker ? "attacker" : "defender"; }

const char* terminal_name(Terminal t) {
    switch (t) {
        case Terminal::None: return "none";
        case Terminal::DefenderWin: return "defender-win";
        case Terminal::AttackerWin: return "attacker-win";
    }
    return "none";
}

GameState parse_fen(std::string_view text, const RuleConfig& config) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.remove_suffix(1);
    const auto toks = split_ws(text);
    if (toks.size() < 5 || toks.size() > 6)
        throw ParseError(1, toks.empty() ? 1 : toks.back().column,
                         "expected 5 or 6 fields, got " + std::to_string(toks.size()));

    const Token& dim = toks[0];
    const auto x = dim.text.find('x');
    if (x == std::string_view::npos) throw ParseError(1, dim.column, "expected <W>x<H>");
    const int width = parse_positive(dim.text.substr(0, x), dim.column);
    const int height = parse_positive(dim.text.substr(x + 1), dim.column + static_cast<int>(x) + 1);
    if (width > kMaxBoardWidth) throw ParseError(1, dim.column, "width above " + std::to_string(kMaxBoardWidth));

    const Token& mover = toks[2];
    Side to_move;
    if (mover.text == "a") to_move = Side::Attacker;
    else if (mover.text == "d") to_move = Side::Defender;
    else throw ParseError(1, mover.column, "mover must be 'a' or 'd'");

    std::optional<Square> throne;
    if (toks[3].text != "-") {
        throne = parse_square_at(toks[3].text, 1, toks[3].column);
        if (throne->col >= width || throne->row >= height)
            throw ParseError(1, toks[3].column, "throne off the board");
    }

    std::vector<Square> havens;
    if (toks[4].text != "-") {
        std::string_view rest = toks[4].text;
        int col = toks[4].column;
        while (true) {
            const auto comma = rest.find(',');
            const std::string_view part = rest.substr(0, comma);
            const Square h = parse_square_at(part, 1, col);
            if (h.col >= width || h.row >= height) throw ParseError(1, col, "haven off the board");
            for (const Square& o : havens)
                if (o == h) throw ParseError(1, col, "duplicate haven");
            if (throne && h == *throne) throw ParseError(1, col, "haven on the throne");
            havens.push_back(h);
            if (comma == std::string_view::npos) break;
            col += static_cast<int>(comma) + 1;
            rest = rest.substr(comma + 1);
        }
    }

    bool force_fragment = false, force_full = false, left_throne = false;
    if (toks.size() == 6) {
        for (std::size_t i = 0; i < toks[5].text.size(); ++i) {
            const char c = toks[5].text[i];
            const int col = toks[5].column + static_cast<int>(i);
            if (c == 'F' && !force_fragment) force_fragment = true;
            else if (c == 'N' && !force_full) force_full = true;
            else if (c == 'T' && !left_throne) left_throne = true;
            else throw ParseError(1, col, std::string("unknown or repeated flag '") + c + "'");
        }
        if (force_fragment && force_full) throw ParseError(1, toks[5].column, "flags F and N conflict");
    }

    GameState st(BoardGeometry(width, height, throne, havens), config, to_move, false);
    const BoardGeometry& g = st.geometry();

    const Token& rows = toks[1];
    int row = height - 1;
    int col = 0;
    bool king_seen = false;
    int run = 0;
    bool in_run = false;
    auto flush_run = [&](int column) {
        if (!in_run) return;
        if (run == 0) throw ParseError(1, column, "empty run of zero squares");
        col += run;
        if (col > width) throw ParseError(1, column, "row expands past width " + std::to_string(width));
        run = 0;
        in_run = false;
    };
    for (std::size_t i = 0; i <= rows.text.size(); ++i) {
        const int column = rows.column + static_cast<int>(i);
        const char c = i < rows.text.size() ? rows.text[i] : '/';
        if (std::isdigit(static_cast<unsigned char>(c))) {
            if (!in_run && c == '0') throw ParseError(1, column, "run with leading zero");
            run = run * 10 + (c - '0');
            in_run = true;
            if (run > kMaxBoardWidth) throw ParseError(1, column, "run longer than any board row");
            continue;
        }
        flush_run(column);
        if (c == '/') {
            if (col != width)
                throw ParseError(1, column, "row " + std::to_string(row + 1) + " expands to " +
                                                std::to_string(col) + " squares, expected " +
                                                std::to_string(width));
            col = 0;
            --row;
            if (i < rows.text.size() && row < 0) throw ParseError(1, column, "more rows than height");
            continue;
        }
        Piece p;
        if (c == 'p') p = {Side::Attacker, PieceKind::Soldier};
        else if (c == 'P') p = {Side::Defender, PieceKind::Soldier};
        else if (c == 'K') p = {Side::Defender, PieceKind::King};
        else throw ParseError(1, column, std::string("unexpected character '") + c + "'");
        if (col >= width) throw ParseError(1, column, "row expands past width " + std::to_string(width));
        if (row < 0) throw ParseError(1, column, "more rows than height");
        const Square s{col, row};
        if (p.kind == PieceKind::King) {
            if (king_seen) throw ParseError(1, column, "two Kings");
            king_seen = true;
        } else if (g.is_haven(s)) {
            throw ParseError(1, column, "soldier on a haven");
        }
        if (g.is_throne(s) && p.kind == PieceKind::Soldier) {
            const ThroneAccess a = config.throne_access;
            const bool ok = a == ThroneAccess::AllNormal ||
                            (a == ThroneAccess::DefendersThroughAndStop && p.owner == Side::Defender);
            if (!ok) throw ParseError(1, column, "soldier on the throne");
        }
        st.place(s, p);
        ++col;
    }
    if (row >= 0)
        throw ParseError(1, rows.column + static_cast<int>(rows.text.size()),
                         std::to_string(height - 1 - row) + " rows given, expected " + std::to_string(height));

    st.set_fragment_mode(force_fragment || (!king_seen && !force_full));
    st.set_king_left_throne(left_throne);
    st.reset_history();
    return st;
}

std::string emit_fen(const GameState& st) {
    const BoardGeometry& g = st.geometry();
    std::string out = std::to_string(g.width()) + "x" + std::to_string(g.height()) + " ";
    for (int row = g.height() - 1; row >= 0; --row) {
        int run = 0;
        for (int col = 0; col < g.width(); ++col) {
            const Cell c = st.at(Square{col, row});
            if (c == Cell::Empty) {
                ++run;
                continue;
            }
            if (run) out += std::to_string(run);
            run = 0;
            out += c == Cell::AttackerSoldier ? 'p' : c == Cell::DefenderSoldier ? 'P' : 'K';
        }
        if (run) out += std::to_string(run);
        if (row) out += '/';
    }
    out += st.to_move() == Side::Attacker ? " a " : " d ";
    out += g.throne() ? square_name(*g.throne()) : "-";
    out += ' ';
    if (g.havens().empty()) {
        out += '-';
    } else {
        for (std::size_t i = 0; i < g.havens().size(); ++i) {
            if (i) out += ',';
            out += square_name(g.havens()[i]);
        }
    }
    std::string flags;
    const bool kingless = !st.king().has_value();
    if (st.fragment_mode() && !kingless) flags += 'F';
    if (!st.fragment_mode() && kingless) flags += 'N';
    if (st.king_left_throne()) flags += 'T';
    if (!flags.empty()) out += ' ' + flags;
    return out;
}

GameState brandubh(const RuleConfig& config) {
    return parse_fen("7x7 3p3/3p3/3P3/ppPKPpp/3P3/3p3/3p3 a d4 a1,a7,g1,g7", config);
}

std::string render_board(const GameState& st) {
    const BoardGeometry& g = st.geometry();
    std::ostringstream os;
    for (int row = g.height() - 1; row >= 0; --row) {
        os << (row + 1 < 10 ? " " : "") << row + 1 << ' ';
        for (int col = 0; col < g.width(); ++col) {
            const Square s{col, row};
            const Cell c = st.at(s);
            char ch = '.';
            if (c == Cell::AttackerSoldier) ch = 'p';
            else if (c == Cell::DefenderSoldier) ch = 'P';
            else if (c == Cell::King) ch = 'K';
            else if (g.is_haven(s)) ch = '#';
            else if (g.is_throne(s)) ch = '+';
            os << ' ' << ch;
        }
        os << '\n';
    }
    if (g.width() > 26) {
        os << "   ";
        for (int col = 0; col < g.width(); ++col) os << ' ' << (col < 26 ? ' ' : column_name(col)[0]);
        os << '\n';
    }
    os << "   ";
    for (int col = 0; col < g.width(); ++col) os << ' ' << column_name(col).back();
    os << '\n';
    return os.str();
}

}  // namespace tafl
