#include "tafl/solver.hpp"

#include <algorithm>
#include <array>
#include <mutex>
#include <string>

#include "tafl/rules.hpp"

namespace tafl {

namespace {

// Scores are absolute in ply: a win reached at ply p from the search root is
// kWin - p. Horizon leaves score beyond every real win or loss, with the sign
// chosen by which side the pass is pessimistic for.
constexpr int kWin = 100000;
constexpr int kHorizon = kWin + 1;
constexpr int kInf = kHorizon + 1;
constexpr std::size_t kDefaultTable = std::size_t{1} << 18;

bool is_mate(int s) { return s != 0 && s >= -kWin && s <= kWin; }

std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    return x ^ (x >> 33);
}

std::string pack(const GameState& st) {
    const auto& cells = st.cells();
    std::string out((cells.size() + 3) / 4 + 1, '\0');
    for (std::size_t i = 0; i < cells.size(); ++i)
        out[i / 4] = static_cast<char>(out[i / 4] | (static_cast<int>(cells[i]) << (2 * (i % 4))));
    out.back() = static_cast<char>((st.to_move() == Side::Defender ? 1 : 0) |
                                   (st.king_left_throne() ? 2 : 0));
    return out;
}

enum class Bound : std::uint8_t { Exact, Lower, Upper };

class MemoTable {
public:
    explicit MemoTable(std::size_t capacity) : entries_(capacity) {}

    bool enabled() const { return !entries_.empty(); }

    struct Hit {
        int score;
        Bound bound;
    };

    std::optional<Hit> probe(std::uint64_t key, std::uint64_t pathset, int depth, int pess,
                             const std::string& packed) {
        const std::size_t i = slot(key, pathset, depth, pess);
        std::lock_guard<std::mutex> lk(locks_[i % locks_.size()]);
        const Entry& e = entries_[i];
        if (!e.used || e.key != key || e.pathset != pathset || e.depth != depth || e.pess != pess ||
            e.packed != packed)
            return std::nullopt;
        return Hit{e.score, e.bound};
    }

    void store(std::uint64_t key, std::uint64_t pathset, int depth, int pess, std::string packed,
               int score, Bound bound) {
        const std::size_t i = slot(key, pathset, depth, pess);
        std::lock_guard<std::mutex> lk(locks_[i % locks_.size()]);
        Entry& e = entries_[i];
        e.used = true;
        e.key = key;
        e.pathset = pathset;
        e.depth = depth;
        e.pess = pess;
        e.packed = std::move(packed);
        e.score = score;
        e.bound = bound;
    }

private:
    struct Entry {
        std::uint64_t key = 0;
        std::uint64_t pathset = 0;
        std::string packed;
        int depth = 0;
        int score = 0;
        std::int8_t pess = 0;
        Bound bound = Bound::Exact;
        bool used = false;
    };

    std::size_t slot(std::uint64_t key, std::uint64_t pathset, int depth, int pess) const {
        return mix(key ^ mix(pathset + 1) ^ (static_cast<std::uint64_t>(depth) << 40) ^
                   static_cast<std::uint64_t>(pess)) %
               entries_.size();
    }

    std::vector<Entry> entries_;
    std::array<std::mutex, 64> locks_;
};

struct BudgetHit {};

class Searcher {
public:
    Searcher(MemoTable* table, std::optional<std::uint64_t> budget) : table_(table), budget_(budget) {}

    std::uint64_t nodes() const { return nodes_; }

    // Value of `st` for its mover. Unknown leaves count as worst for `pessimistic`.
    int search(const GameState& st, int depth, int ply, int alpha, int beta, Side pessimistic) {
        ++nodes_;
        if (budget_ && nodes_ > *budget_) throw BudgetHit{};

        const Terminal t = static_terminal(st);
        if (t != Terminal::None) {
            const bool mover_won = (t == Terminal::DefenderWin) == (st.to_move() == Side::Defender);
            return mover_won ? kWin - ply : -(kWin - ply);
        }
        const std::uint64_t h = st.hash();
        for (std::size_t i = window_; i < path_.size(); ++i)
            if (path_[i] == h) return 0;
        if (depth == 0) {
            if (pseudo_legal_moves(st).empty()) return -(kWin - ply);
            return st.to_move() == pessimistic ? -kHorizon : kHorizon;
        }

        std::vector<ScoredMove> moves = scored_legal_moves(st);
        if (moves.empty()) return -(kWin - ply);
        for (const ScoredMove& m : moves)
            if (m.result.terminal != Terminal::None) return kWin - (ply + 1);

        const int pess = pessimistic == st.to_move() ? 1 : 0;
        std::string packed;
        if (table_ && table_->enabled()) {
            packed = pack(st);
            if (auto hit = table_->probe(h, pathset_, depth, pess, packed)) {
                const int s = from_table(hit->score, ply);
                if (hit->bound == Bound::Exact) return s;
                if (hit->bound == Bound::Lower && s >= beta) return s;
                if (hit->bound == Bound::Upper && s <= alpha) return s;
            }
        }

        const int orig_alpha = alpha;
        int best = -kInf;
        path_.push_back(h);
        const std::uint64_t saved_set = pathset_;
        pathset_ ^= mix(h);
        for (const ScoredMove& m : moves) {
            const GameState child = apply_unchecked(st, m.move, m.result);
            int v;
            if (!m.result.captures.empty()) {
                // Material only decreases, so nothing before a capture can recur.
                const std::size_t w = window_;
                const std::uint64_t ps = pathset_;
                window_ = path_.size();
                pathset_ = 0;
                v = -search(child, depth - 1, ply + 1, -beta, -alpha, pessimistic);
                window_ = w;
                pathset_ = ps;
            } else {
                v = -search(child, depth - 1, ply + 1, -beta, -alpha, pessimistic);
            }
            if (v > best) best = v;
            if (best > alpha) alpha = best;
            if (alpha >= beta) break;
        }
        path_.pop_back();
        pathset_ = saved_set;

        if (table_ && table_->enabled()) {
            const Bound b = best <= orig_alpha ? Bound::Upper : best >= beta ? Bound::Lower : Bound::Exact;
            table_->store(h, pathset_, depth, pess, std::move(packed), to_table(best, ply), b);
        }
        return best;
    }

    // Makes `st` an ancestor of whatever is searched next.
    void push(const GameState& st, bool next_is_capture) {
        saved_.push_back({window_, pathset_});
        path_.push_back(st.hash());
        pathset_ ^= mix(st.hash());
        if (next_is_capture) {
            window_ = path_.size();
            pathset_ = 0;
        }
    }

    void pop_one() {
        path_.pop_back();
        window_ = saved_.back().first;
        pathset_ = saved_.back().second;
        saved_.pop_back();
    }

private:
    static int to_table(int s, int ply) {
        if (is_mate(s)) return s > 0 ? s + ply : s - ply;
        return s;
    }
    static int from_table(int s, int ply) {
        if (is_mate(s)) return s > 0 ? s - ply : s + ply;
        return s;
    }

    MemoTable* table_;
    std::optional<std::uint64_t> budget_;
    std::uint64_t nodes_ = 0;
    std::vector<std::uint64_t> path_;
    std::size_t window_ = 0;
    std::uint64_t pathset_ = 0;
    std::vector<std::pair<std::size_t, std::uint64_t>> saved_;
};

Verdict verdict_of(Side winner) {
    return winner == Side::Attacker ? Verdict::AttackerWin : Verdict::DefenderWin;
}

// Turns the two pass values into an outcome for the root mover.
Outcome classify(Side mover, int pess, std::optional<int> opt) {
    Outcome o;
    if (is_mate(pess) && pess > 0) {
        o.verdict = verdict_of(mover);
        o.plies = kWin - pess;
        return o;
    }
    if (opt && is_mate(*opt) && *opt < 0) {
        o.verdict = verdict_of(opponent(mover));
        o.plies = kWin + *opt;
        return o;
    }
    if (opt && pess == 0 && *opt == 0) {
        o.verdict = Verdict::Draw;
        return o;
    }
    o.verdict = Verdict::Unknown;
    return o;
}

Outcome terminal_outcome(const GameState& st) {
    Outcome o;
    const Terminal t = terminal_status(st);
    o.verdict = t == Terminal::AttackerWin ? Verdict::AttackerWin : Verdict::DefenderWin;
    o.plies = 0;
    return o;
}

std::size_t capacity_of(const SearchLimits& l) { return l.table_capacity.value_or(kDefaultTable); }

Outcome solve_values(const GameState& root, const SearchLimits& limits) {
    MemoTable table(capacity_of(limits));
    Searcher s(&table, limits.node_budget);
    Outcome o;
    try {
        const int pess = s.search(root, limits.max_plies, 0, -kInf, kInf, root.to_move());
        std::optional<int> opt;
        if (!(is_mate(pess) && pess > 0))
            opt = s.search(root, limits.max_plies, 0, -kInf, kInf, opponent(root.to_move()));
        o = classify(root.to_move(), pess, opt);
    } catch (const BudgetHit&) {
        o.verdict = Verdict::Unknown;
        o.budget_exceeded = true;
    }
    o.nodes = s.nodes();
    return o;
}

bool is_win(Verdict v) { return v == Verdict::AttackerWin || v == Verdict::DefenderWin; }

std::vector<Move> extract_line(const GameState& root, const SearchLimits& limits, Verdict verdict,
                               int plies) {
    const Side winner = verdict == Verdict::AttackerWin ? Side::Attacker : Side::Defender;
    MemoTable table(capacity_of(limits));
    Searcher s(&table, std::nullopt);
    std::vector<Move> line;
    GameState cur = root;
    for (int ply = 0; ply < plies; ++ply) {
        const int remaining = plies - ply;
        bool found = false;
        for (const ScoredMove& m : scored_legal_moves(cur)) {
            GameState child = apply_unchecked(cur, m.move, m.result);
            bool ok;
            if (remaining == 1) {
                const Terminal t = terminal_status(child);
                ok = t == (winner == Side::Attacker ? Terminal::AttackerWin : Terminal::DefenderWin);
            } else {
                // A child search starting at ply+1 scores the winner's win at
                // ply `plies` as kWin - plies from the child mover's view.
                s.push(cur, !m.result.captures.empty());
                const int v = s.search(child, remaining - 1, ply + 1, -kInf, kInf, winner);
                const int want = child.to_move() == winner ? kWin - plies : -(kWin - plies);
                ok = v == want;
                s.pop_one();
            }
            if (ok) {
                line.push_back(m.move);
                s.push(cur, !m.result.captures.empty());
                cur = std::move(child);
                found = true;
                break;
            }
        }
        if (!found) throw NoProvenWin("principal variation could not be reconstructed");
    }
    return line;
}

}  // namespace

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::AttackerWin: return "attacker-win";
        case Verdict::DefenderWin: return "defender-win";
        case Verdict::Draw: return "draw";
        case Verdict::Unknown: return "unknown";
    }
    return "unknown";
}

Outcome solve(const GameState& state, const SearchLimits& limits) {
    if (limits.max_plies < 1) throw std::invalid_argument("max_plies must be at least 1");
    if (terminal_status(state) != Terminal::None) return terminal_outcome(state);
    Outcome o = solve_values(state, limits);
    if (is_win(o.verdict)) o.line = extract_line(state, limits, o.verdict, *o.plies);
    return o;
}

Outcome solve_parallel(const GameState& state, const SearchLimits& limits) {
    if (limits.max_plies < 1) throw std::invalid_argument("max_plies must be at least 1");
    if (terminal_status(state) != Terminal::None) return terminal_outcome(state);

    const std::vector<ScoredMove> moves = scored_legal_moves(state);
    for (const ScoredMove& m : moves) {
        if (m.result.terminal != Terminal::None) return solve(state, limits);
    }
    const int n = static_cast<int>(moves.size());
    MemoTable table(capacity_of(limits));
    const Side mover = state.to_move();
    std::array<int, 2> best{-kInf, -kInf};
    std::uint64_t total_nodes = 1;
    bool budget_hit = false;

    for (int pass = 0; pass < 2; ++pass) {
        const Side pessimistic = pass == 0 ? mover : opponent(mover);
        std::vector<int> values(moves.size(), -kInf);
        std::uint64_t pass_nodes = 0;
        bool hit = false;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : pass_nodes) reduction(|| : hit)
        for (int i = 0; i < n; ++i) {
            Searcher s(&table, limits.node_budget);
            s.push(state, !moves[i].result.captures.empty());
            GameState child = apply_unchecked(state, moves[i].move,
                                              moves[i].result);
            try {
                values[i] = -s.search(child, limits.max_plies - 1, 1, -kInf, kInf, pessimistic);
            } catch (const BudgetHit&) {
                hit = true;
            }
            pass_nodes += s.nodes();
        }
        total_nodes += pass_nodes;
        if (hit) {
            budget_hit = true;
            break;
        }
        for (int v : values) best[pass] = std::max(best[pass], v);
        if (pass == 0 && is_mate(best[0]) && best[0] > 0) break;
    }

    Outcome o;
    if (budget_hit) {
        o.verdict = Verdict::Unknown;
        o.budget_exceeded = true;
    } else {
        std::optional<int> opt;
        if (best[1] != -kInf) opt = best[1];
        o = classify(mover, best[0], opt);
        if (is_win(o.verdict)) o.line = extract_line(state, limits, o.verdict, *o.plies);
    }
    o.nodes = total_nodes;
    return o;
}

std::vector<Move> best_line(const GameState& state, const SearchLimits& limits) {
    const Outcome o = solve(state, limits);
    if (!is_win(o.verdict) || !o.plies || *o.plies == 0) throw NoProvenWin("no win proven within the limits");
    return o.line;
}

std::vector<MoveValue> evaluate_moves(const GameState& state, const SearchLimits& limits) {
    std::vector<MoveValue> out;
    for (const ScoredMove& m : scored_legal_moves(state)) {
        GameState child = apply_unchecked(state, m.move, m.result);
        MoveValue mv{m.move, Verdict::Unknown, std::nullopt};
        if (terminal_status(child) != Terminal::None) {
            const Terminal t = terminal_status(child);
            mv.verdict = t == Terminal::AttackerWin ? Verdict::AttackerWin : Verdict::DefenderWin;
            mv.plies = 1;
        } else if (limits.max_plies > 1) {
            SearchLimits sub = limits;
            sub.max_plies = limits.max_plies - 1;
            const Outcome o = solve_values(child, sub);
            mv.verdict = o.verdict;
            if (o.plies) mv.plies = *o.plies + 1;
        }
        out.push_back(mv);
    }
    return out;
}

std::uint64_t perft(const GameState& state, int depth) {
    if (depth <= 0) return 1;
    std::uint64_t total = 0;
    for (const ScoredMove& m : scored_legal_moves(state)) {
        if (depth == 1) {
            ++total;
            continue;
        }
        total += perft(apply_unchecked(state, m.move, m.result), depth - 1);
    }
    return total;
}

std::uint64_t perft_parallel(const GameState& state, int depth) {
    if (depth <= 1) return perft(state, depth);
    const std::vector<ScoredMove> moves = scored_legal_moves(state);
    const int n = static_cast<int>(moves.size());
    std::uint64_t total = 0;
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : total)
    for (int i = 0; i < n; ++i) {
        total += perft(apply_unchecked(state, moves[i].move, moves[i].result),
                       depth - 1);
    }
    return total;
}

}  // namespace tafl
