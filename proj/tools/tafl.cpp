// Command-line front end: position tools, solver, gadget lab, circuit compiler
// and the JSON session service.

#include <CLI11.hpp>
#include <httplib.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tafl/api.hpp"
#include "tafl/circuit.hpp"
#include "tafl/compiler.hpp"
#include "tafl/gadgets.hpp"
#include "tafl/notation.hpp"
#include "tafl/rules.hpp"
#include "tafl/server.hpp"
#include "tafl/solver.hpp"

using namespace tafl;
using json = nlohmann::json;

namespace {

struct Common {
    std::string fen;
    std::string config;
    bool as_json = false;
};

GameState load(const Common& c) {
    RuleConfig cfg;
    if (!c.config.empty()) {
        const json j = json::parse(c.config, nullptr, false);
        if (j.is_discarded()) throw std::invalid_argument("--config is not valid JSON");
        cfg = api::config_from_json(j);
    }
    return c.fen.empty() ? brandubh(cfg) : parse_fen(c.fen, cfg);
}

json moves_json(const std::vector<Move>& ms) {
    json a = json::array();
    for (const Move& m : ms) a.push_back(move_name(m));
    return a;
}

std::string joined(const std::vector<Move>& ms) {
    std::string s;
    for (const Move& m : ms) s += (s.empty() ? "" : " ") + move_name(m);
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void add_common(CLI::App* sub, Common& c, bool with_fen = true) {
    if (with_fen) {
        sub->add_option("--fen", c.fen, "position (default: Brandubh start)");
        sub->add_option("--config", c.config, "rule config as JSON, e.g. '{\"traps\":true}'");
    }
    sub->add_flag("--json", c.as_json, "machine-readable output");
}

int cmd_fen(const Common& c) {
    const GameState st = load(c);
    if (c.as_json) {
        std::cout << api::state_json(st).dump(2) << '\n';
        return 0;
    }
    std::cout << render_board(st) << emit_fen(st) << '\n'
              << "to move: " << side_name(st.to_move()) << ", terminal: " << terminal_name(terminal_status(st))
              << '\n';
    return 0;
}

int cmd_moves(const Common& c, bool all) {
    const GameState st = load(c);
    std::vector<Move> ms = all ? pseudo_legal_moves(st) : legal_moves(st);
    std::sort(ms.begin(), ms.end());
    const bool forced = !all && forced_active(st);
    if (c.as_json) {
        std::cout << json{{"to_move", side_name(st.to_move())}, {"forced", forced}, {"moves", moves_json(ms)}}.dump()
                  << '\n';
        return 0;
    }
    std::cout << ms.size() << " move(s)" << (forced ? ", forced" : "") << '\n';
    for (const Move& m : ms) std::cout << move_name(m) << '\n';
    return 0;
}

int cmd_play(const Common& c, const std::vector<std::string>& moves) {
    GameState st = load(c);
    json log = json::array();
    for (std::size_t i = 0; i < moves.size(); ++i) {
        const Move m = parse_move(moves[i]);
        if (auto err = check_move(st, m)) {
            if (c.as_json)
                std::cout << json{{"error", reason_code(*err)}, {"ply", i}, {"move", move_name(m)}, {"played", log}}
                                 .dump()
                          << '\n';
            else
                std::cerr << "ply " << i << ": " << move_name(m) << " rejected: " << reason_code(*err) << '\n';
            return 2;
        }
        auto [next, result] = apply_move(st, m);
        json caps = json::array();
        for (const Square& s : result.captures) caps.push_back(square_name(s));
        log.push_back({{"move", move_name(m)}, {"captures", caps}, {"terminal", terminal_name(result.terminal)}});
        if (!c.as_json) {
            std::cout << i << ' ' << move_name(m);
            for (const Square& s : result.captures) std::cout << " x" << square_name(s);
            std::cout << '\n';
        }
        st = std::move(next);
    }
    if (c.as_json) {
        json j = api::state_json(st);
        j["played"] = log;
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::cout << render_board(st) << emit_fen(st) << '\n'
              << "terminal: " << terminal_name(terminal_status(st)) << '\n';
    return 0;
}

int cmd_solve(const Common& c, int max_plies, long long budget, long long table, bool parallel) {
    const GameState st = load(c);
    SearchLimits lim{max_plies, std::nullopt, std::nullopt};
    if (budget > 0) lim.node_budget = static_cast<std::uint64_t>(budget);
    if (table >= 0) lim.table_capacity = static_cast<std::size_t>(table);
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = parallel ? solve_parallel(st, lim) : solve(st, lim);
    const double secs = seconds_since(t0);
    if (c.as_json) {
        json j = {{"verdict", verdict_name(o.verdict)}, {"line", moves_json(o.line)}, {"nodes", o.nodes},
                  {"budget_exceeded", o.budget_exceeded}, {"max_plies", max_plies}, {"seconds", secs}};
        j["plies"] = o.plies ? json(*o.plies) : json(nullptr);
        std::cout << j.dump() << '\n';
        return 0;
    }
    std::cout << "verdict: " << verdict_name(o.verdict);
    if (o.plies) std::cout << " in " << *o.plies << " plies";
    std::cout << '\n';
    if (!o.line.empty()) std::cout << "line: " << joined(o.line) << '\n';
    std::cout << "nodes: " << o.nodes << (o.budget_exceeded ? " (budget exceeded)" : "") << "\ntime: " << secs
              << " s\n";
    return 0;
}

int cmd_perft(const Common& c, int depth, bool parallel, bool divide) {
    const GameState st = load(c);
    const auto t0 = std::chrono::steady_clock::now();
    json per = json::object();
    std::uint64_t total = 0;
    if (divide) {
        std::vector<Move> ms = legal_moves(st);
        std::sort(ms.begin(), ms.end());
        for (const Move& m : ms) {
            const std::uint64_t n = depth <= 1 ? 1 : perft(apply_move(st, m).first, depth - 1);
            per[move_name(m)] = n;
            total += n;
            if (!c.as_json) std::cout << move_name(m) << ": " << n << '\n';
        }
    } else {
        total = parallel ? perft_parallel(st, depth) : perft(st, depth);
    }
    const double secs = seconds_since(t0);
    if (c.as_json) {
        json j = {{"depth", depth}, {"nodes", total}, {"seconds", secs}};
        if (divide) j["divide"] = per;
        std::cout << j.dump() << '\n';
    } else {
        std::cout << "perft(" << depth << ") = " << total << "  (" << secs << " s)\n";
    }
    return 0;
}

const gadgets::GadgetTrace* find_any_trace(const std::string& name) { return gadgets::catalog().find_trace(name); }

int cmd_gadget_list(const Common& c) {
    const auto& cat = gadgets::catalog();
    json j = {{"templates", json::array()}, {"traces", json::array()}, {"appendix", json::array()}};
    for (const auto& t : cat.templates) j["templates"].push_back(t.name);
    for (const auto& t : cat.template_traces) j["traces"].push_back(t.name);
    for (const auto& t : cat.appendix_traces) j["appendix"].push_back(t.name);
    if (c.as_json) {
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::cout << "templates:\n";
    for (const auto& t : cat.templates) std::cout << "  " << t.name << "  " << t.width << 'x' << t.height << '\n';
    std::cout << "traces:\n";
    for (const auto& t : cat.template_traces) std::cout << "  " << t.name << "  fig " << t.figure << '\n';
    std::cout << "appendix composites:\n";
    for (const auto& t : cat.appendix_traces) std::cout << "  " << t.name << "  fig " << t.figure << '\n';
    return 0;
}

int cmd_gadget_show(const Common& c, const std::string& name) {
    const auto& cat = gadgets::catalog();
    for (const auto& t : cat.templates)
        if (t.name == name) {
            if (c.as_json) std::cout << json{{"name", name}, {"text", gadgets::template_text(t)}}.dump(2) << '\n';
            else std::cout << gadgets::template_text(t);
            return 0;
        }
    const gadgets::GadgetTrace* t = find_any_trace(name);
    if (!t) throw std::invalid_argument("no template or trace named " + name);
    const GameState st = gadgets::build_position(*t);
    if (c.as_json) {
        std::cout << json{{"name", name}, {"figure", t->figure}, {"fen", emit_fen(st)}, {"text", gadgets::trace_text(*t)}}
                         .dump(2)
                  << '\n';
        return 0;
    }
    std::cout << t->description << " (fig " << t->figure << ")\n" << render_board(st) << emit_fen(st) << '\n'
              << gadgets::trace_text(*t);
    return 0;
}

int cmd_gadget_verify(const Common& c, std::vector<std::string> names, bool all) {
    const auto& cat = gadgets::catalog();
    std::vector<const gadgets::GadgetTrace*> main_traces, appendix;
    if (all || names.empty()) {
        for (const auto& t : cat.template_traces) main_traces.push_back(&t);
        for (const auto& t : cat.appendix_traces) appendix.push_back(&t);
    } else {
        for (const auto& n : names) {
            const auto* t = find_any_trace(n);
            if (!t) throw std::invalid_argument("no trace named " + n);
            const bool in_appendix = std::any_of(cat.appendix_traces.begin(), cat.appendix_traces.end(),
                                                 [&](const auto& a) { return a.name == n; });
            (in_appendix ? appendix : main_traces).push_back(t);
        }
    }
    json out = json::array();
    int failed = 0;
    auto run = [&](const std::vector<const gadgets::GadgetTrace*>& list, const char* label) {
        int pass = 0, unlisted = 0;
        for (const auto* t : list) {
            const auto r = gadgets::verify_trace(*t);
            pass += r.pass;
            unlisted += r.unlisted;
            failed += !r.pass;
            if (c.as_json) {
                json fails = r.failures;
                out.push_back({{"trace", t->name}, {"group", label}, {"pass", r.pass}, {"unlisted", r.unlisted},
                               {"failures", fails}});
            } else if (!r.pass || names.size() > 0) {
                std::cout << r.text();
            }
        }
        if (!c.as_json && !list.empty())
            std::cout << label << ": " << pass << '/' << list.size() << " pass"
                      << (unlisted ? ", " + std::to_string(unlisted) + " unlisted forced alternatives met" : "") << '\n';
    };
    run(main_traces, "templates");
    run(appendix, "appendix");
    if (c.as_json) std::cout << out.dump(2) << '\n';
    return failed ? 1 : 0;
}

json placement_json(const Compiled& comp, const InterferenceReport& rep) {
    json inst = json::array();
    for (const auto& p : comp.placement.instances)
        inst.push_back({{"label", p.label},
                        {"template", p.inst.template_name},
                        {"transform", p.inst.transform.name()},
                        {"swapped", p.inst.colors_swapped},
                        {"box", {square_name(p.inst.box_min), square_name(p.inst.box_max)}}});
    json viol = json::array();
    for (const auto& v : rep.violations) viol.push_back({{"line", v.line}, {"a", v.a}, {"b", v.b}, {"description", v.description}});
    return {{"fen", emit_fen(comp.state)},
            {"size", comp.placement.size},
            {"instances", inst},
            {"manifest", comp.placement.manifest()},
            {"interference", viol}};
}

int cmd_compile(const Common& c, const std::string& path, int spacing, bool board) {
    const CircuitGraph g = parse_circuit(read_file(path));
    const Compiled comp = compile(g, spacing);
    const InterferenceReport rep = check_interference(comp.state, comp.placement);
    if (c.as_json) {
        std::cout << placement_json(comp, rep).dump(2) << '\n';
        return 0;
    }
    if (board) std::cout << render_board(comp.state);
    std::cout << emit_fen(comp.state) << '\n' << comp.placement.manifest() << "interference: " << rep.text();
    return 0;
}

int cmd_verify(const Common& c, const std::string& path, int spacing, const std::vector<std::string>& claims,
               const std::vector<std::string>& false_claims, const std::vector<std::string>& choice) {
    const CircuitGraph g = parse_circuit(read_file(path));
    const Compiled comp = compile(g, spacing);
    StrategyChoices ch;
    ch.true_claims = claims;
    ch.false_claims = false_claims;
    for (const auto& s : choice) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--choice expects node=0|1");
        ch.choice_out[s.substr(0, eq)] = std::stoi(s.substr(eq + 1));
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const SimulationReport r = simulate_strategy(comp.state, comp.placement, ch);
        if (c.as_json) {
            json plies = json::array();
            for (const auto& p : r.plies)
                plies.push_back({{"mover", side_name(p.mover)}, {"played", move_name(p.played)},
                                 {"forced", moves_json(p.forced)}, {"note", p.note}});
            json j = {{"victory_activated", r.victory_activated}, {"result", terminal_name(r.result)},
                      {"true_player_wins", r.true_player_wins}, {"unscripted", r.unscripted},
                      {"stale_captures", r.stale_captures}, {"alternate_hammers", r.alternate_hammers}, {"plies", plies}, {"seconds", seconds_since(t0)}};
            j["solver_plies"] = r.solver_plies ? json(*r.solver_plies) : json(nullptr);
            std::cout << j.dump(2) << '\n';
        } else {
            std::cout << r.text();
        }
        return 0;
    } catch (const ScriptDiverged& e) {
        if (c.as_json)
            std::cout << json{{"error", "script-diverged"}, {"ply", e.ply()}, {"message", e.what()},
                              {"observed", moves_json(e.observed())}, {"expected", moves_json(e.expected())}}
                             .dump(2)
                      << '\n';
        else
            std::cerr << "diverged at ply " << e.ply() << ": " << e.what() << "\n  observed " << joined(e.observed())
                      << "\n  expected " << joined(e.expected()) << '\n';
        return 3;
    }
}

int cmd_serve(const std::string& host, int port) {
    api::SessionManager sessions;
    httplib::Server server;
    api::install_routes(server, sessions);
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
        std::cerr << "cannot listen on " << host << ':' << port << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tafl: forced-capture hnefatafl engine, solver and gadget compiler"};
    app.require_subcommand(1);
    Common common;

    auto* fen = app.add_subcommand("fen", "parse, normalise and draw a position");
    add_common(fen, common);

    bool all_moves = false;
    auto* moves = app.add_subcommand("moves", "list legal moves");
    add_common(moves, common);
    moves->add_flag("--all", all_moves, "ignore the forced-capture filter");

    std::vector<std::string> play_moves;
    auto* play = app.add_subcommand("play", "apply moves and show the result");
    add_common(play, common);
    play->add_option("moves", play_moves, "moves such as b4-b7");

    int max_plies = 5;
    long long budget = 0, table = -1;
    bool parallel = false;
    auto* solve_cmd = app.add_subcommand("solve", "bounded-depth exact solve");
    add_common(solve_cmd, common);
    solve_cmd->add_option("--max-plies", max_plies, "search horizon in plies")->check(CLI::Range(0, 64));
    solve_cmd->add_option("--node-budget", budget, "stop after this many nodes (0: unlimited)");
    solve_cmd->add_option("--table", table, "memo table entries (0 disables)");
    solve_cmd->add_flag("--parallel", parallel, "split the root moves across threads");

    int depth = 3;
    bool divide = false;
    auto* perft_cmd = app.add_subcommand("perft", "count leaf nodes of the legal-move tree");
    add_common(perft_cmd, common);
    perft_cmd->add_option("--depth", depth, "depth in plies")->check(CLI::Range(0, 12));
    perft_cmd->add_flag("--parallel", parallel, "split the root moves across threads");
    perft_cmd->add_flag("--divide", divide, "per-root-move counts");

    auto* gadget = app.add_subcommand("gadget", "gadget catalog");
    gadget->require_subcommand(1);
    auto* g_list = gadget->add_subcommand("list", "list templates and traces");
    add_common(g_list, common, false);
    std::string show_name;
    auto* g_show = gadget->add_subcommand("show", "print a template or trace");
    add_common(g_show, common, false);
    g_show->add_option("name", show_name)->required();
    std::vector<std::string> verify_names;
    bool verify_all = false;
    auto* g_verify = gadget->add_subcommand("verify", "replay traces against the engine");
    add_common(g_verify, common, false);
    g_verify->add_option("names", verify_names, "trace names");
    g_verify->add_flag("--all", verify_all, "every trace in the catalog");

    std::string circuit_path;
    int spacing = 2;
    bool board = false;
    auto* compile_cmd = app.add_subcommand("compile", "compile a circuit file into a position");
    add_common(compile_cmd, common, false);
    compile_cmd->add_option("circuit", circuit_path)->required()->check(CLI::ExistingFile);
    compile_cmd->add_option("--spacing", spacing, "empty margin between cells")->check(CLI::PositiveNumber);
    compile_cmd->add_flag("--board", board, "draw the board");

    std::vector<std::string> claims, false_claims, choice;
    auto* verify = app.add_subcommand("verify", "compile a circuit and replay the true player's strategy");
    add_common(verify, common, false);
    verify->add_option("circuit", circuit_path)->required()->check(CLI::ExistingFile);
    verify->add_option("--spacing", spacing, "empty margin between cells")->check(CLI::PositiveNumber);
    verify->add_option("--claims", claims, "variables the true player claims, in order")->delimiter(',');
    verify->add_option("--false-claims", false_claims, "order of the false player's claims")->delimiter(',');
    verify->add_option("--choice", choice, "choice directions, node=0 (straight) or node=1 (turn)")->delimiter(',');

    std::string host = "127.0.0.1";
    int port = api::default_port();
    auto* serve = app.add_subcommand("serve", "run the JSON session API");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port (default: TAFL_PORT or 8080)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fen) return cmd_fen(common);
        if (*moves) return cmd_moves(common, all_moves);
        if (*play) return cmd_play(common, play_moves);
        if (*solve_cmd) return cmd_solve(common, max_plies, budget, table, parallel);
        if (*perft_cmd) return cmd_perft(common, depth, parallel, divide);
        if (*g_list) return cmd_gadget_list(common);
        if (*g_show) return cmd_gadget_show(common, show_name);
        if (*g_verify) return cmd_gadget_verify(common, verify_names, verify_all);
        if (*compile_cmd) return cmd_compile(common, circuit_path, spacing, board);
        if (*verify) return cmd_verify(common, circuit_path, spacing, claims, false_claims, choice);
        if (*serve) return cmd_serve(host, port);
    } catch (const ParseError& e) {
        if (common.as_json)
            std::cout << json{{"error", "parse-error"}, {"line", e.line()}, {"column", e.column()}, {"message", e.what()}}
                             .dump()
                      << '\n';
        else
            std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        if (common.as_json) std::cout << json{{"error", "failed"}, {"message", e.what()}}.dump() << '\n';
        else std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
