// Command-line front end: instance generation, solving, rollouts, coalition sweeps and the toy example.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "cpdptw/cpdptw.hpp"

using namespace cpdptw;
namespace fs = std::filesystem;

namespace {

enum class Level { Quiet, Info, Debug };

Level log_level() {
    const char* env = std::getenv("CPDPTW_LOG");
    const std::string v = env ? env : "info";
    if (v == "quiet" || v == "0") return Level::Quiet;
    if (v == "debug" || v == "2") return Level::Debug;
    return Level::Info;
}

void log(Level at, const std::string& msg) {
    static const Level level = log_level();
    if (static_cast<int>(at) <= static_cast<int>(level)) std::cerr << msg << '\n';
}

[[noreturn]] void fail(const std::string& type, const std::string& field, const std::string& message, int code = 1) {
    nlohmann::json err{{"type", type}, {"field", field}, {"message", message}};
    std::cerr << "error: " << err.dump() << '\n';
    std::exit(code);
}

// options shared by the scenario-driven commands
struct Common {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<int> customers;
    std::optional<std::string> wind;
    std::string out;
    int threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--scenario", c.scenario, "scenario JSON file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "override the scenario seed");
    cmd->add_option("--customers", c.customers, "override the generated instance size");
    cmd->add_option("--wind", c.wind, "wind preset: none, eastward, westward, turbulent");
    cmd->add_option("--out", c.out, "output directory (defaults to the scenario's)");
    cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

Scenario scenario_of(const Common& c) {
    Scenario s = c.scenario.empty() ? Scenario{} : load_scenario(c.scenario);
    if (c.seed) s.seed = *c.seed;
    if (c.customers) {
        if (s.instance_file) throw ParseError("customers", "cannot resize an instance loaded from a file");
        s.generator.customers = *c.customers;
    }
    if (c.wind) {
        try {
            s.physics.wind = wind_preset(*c.wind, s.seed);
        } catch (const std::invalid_argument& e) {
            throw ParseError("wind", e.what());
        }
    } else {
        s.physics.wind.seed = s.seed;
    }
    if (!c.out.empty()) s.output_dir = c.out;
    return s;
}

struct World {
    Instance inst;
    FleetSpec fleet;
    DualNetwork net;
    std::optional<AdjacencySpec> mask_spec;
};

World world_of(const Scenario& s) {
    World w;
    w.inst = scenario_instance(s);
    w.fleet = scenario_fleet(s, w.inst);
    w.net = build_network(w.inst, s.network, s.adjacency);
    if (s.neighborhood_mask) w.mask_spec = s.adjacency;
    log(Level::Debug, "instance: " + std::to_string(w.inst.n_customers()) + " customers, " +
                          std::to_string(w.fleet.size()) + " vehicles");
    return w;
}

fs::path prepare_dir(const std::string& dir) {
    fs::create_directories(dir);
    return fs::path(dir);
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
}

// Solver output without wall-clock fields, so repeated runs produce identical files.
nlohmann::json stable_report(const SolveReport& r, const Instance& inst, const Simulator& sim) {
    auto j = to_json(r, inst);
    j.erase("seconds");
    nlohmann::json viol = nlohmann::json::array();
    if (r.feasible)
        for (const auto& v : validate(r.solution, sim)) viol.push_back(to_json(v));
    j["violations"] = viol;
    return j;
}

int cmd_gen(int customers, int depots, double area, const std::string& profile, std::uint64_t seed, const std::string& out) {
    WindowProfile p;
    try {
        p = window_profile_from_string(profile);
    } catch (const std::invalid_argument& e) {
        throw ParseError("profile", e.what());
    }
    const Instance inst = generate(customers, depots, area, p, seed);
    if (out.empty() || out == "-") std::cout << to_json(inst).dump(2) << '\n';
    else save_instance(inst, out);
    log(Level::Info, "generated " + std::to_string(customers) + " customers");
    return 0;
}

int cmd_solve(const Common& c, const std::string& solver_override) {
    Scenario s = scenario_of(c);
    if (!solver_override.empty()) s.solver = solver_override;
    const World w = world_of(s);
    const Simulator sim(w.inst, w.fleet, w.net, s.physics, w.mask_spec);
    const fs::path dir = prepare_dir(s.output_dir);
    std::vector<std::string> kinds;
    if (s.solver == "exact" || s.solver == "both") kinds.push_back("exact");
    if (s.solver == "heuristic" || s.solver == "both") kinds.push_back("heuristic");
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& kind : kinds) {
        const SolveReport r = solve(sim, solver_kind_from_string(kind), s.limits, {s.restarts, s.seed});
        summary[kind] = stable_report(r, w.inst, sim);
        std::ofstream csv(dir / ("solution_" + kind + ".csv"));
        if (r.feasible) write_solution_csv(csv, r.solution, w.inst);
        else csv << "vehicle,node,kind,arrival,departure,battery,load\n";
        char line[256];
        std::snprintf(line, sizeof line, "%-9s %-12s cost %s  nodes %ld  %.3fs", kind.c_str(), r.status.c_str(),
                      r.feasible ? std::to_string(r.solution.cost.total).c_str() : "-", static_cast<long>(r.nodes), r.seconds);
        std::cout << line << '\n';
    }
    if (summary.contains("exact") && summary.contains("heuristic") && summary["exact"]["feasible"].get<bool>() &&
        summary["heuristic"]["feasible"].get<bool>()) {
        const double e = summary["exact"]["solution"]["cost"]["total"];
        const double h = summary["heuristic"]["solution"]["cost"]["total"];
        summary["gap"] = gap(h, e);
        std::cout << "heuristic gap " << 100 * gap(h, e) << "%\n";
    }
    detail::write_json_file((dir / "solve.json").string(), summary);
    log(Level::Info, "wrote " + (dir / "solve.json").string());
    return 0;
}

int cmd_rollout(const Common& c, const std::string& strategy, const std::string& weights) {
    Scenario s = scenario_of(c);
    if (!strategy.empty()) {
        try {
            s.strategy = strategy_from_string(strategy);
        } catch (const std::invalid_argument& e) {
            throw ParseError("strategy", e.what());
        }
    }
    if (!weights.empty()) s.weights_file = weights;
    const World w = world_of(s);
    const Simulator sim(w.inst, w.fleet, w.net, s.physics, w.mask_spec);
    const RolloutOptions opt{s.strategy, s.seed, 0};
    Solution sol;
    if (s.weights_file) {
        sol = rollout(sim, AttentionScorer(load_weights(*s.weights_file), s.adjacency), opt);
    } else {
        sol = rollout(sim, greedy_scorer(), opt);
    }
    const fs::path dir = prepare_dir(s.output_dir);
    std::ofstream csv(dir / "rollout.csv");
    write_solution_csv(csv, sol, w.inst);
    auto j = to_json(sol, w.inst);
    detail::write_json_file((dir / "rollout.json").string(), j);
    std::cout << (sol.complete ? "complete" : "incomplete") << ", cost " << sol.cost.total << '\n';
    return 0;
}

int cmd_coalition(const Common& c, int m, int n) {
    const Scenario s = scenario_of(c);
    SweepSetup cfg;
    cfg.inst = scenario_instance(s);
    cfg.nets = build_network(cfg.inst, s.network, s.adjacency);
    cfg.phys = s.physics;
    cfg.solver = s.solver == "exact" ? SolverKind::Exact : s.solver == "heuristic" ? SolverKind::Heuristic : SolverKind::Auto;
    cfg.limits = s.limits;
    cfg.threads = c.threads;
    const SweepResult res = coalition_sweep(cfg, m, n);
    const fs::path dir = prepare_dir(s.output_dir);
    std::ofstream csv(dir / "coalition.csv");
    write_sweep_csv(csv, res);
    std::ostringstream summary;
    summary << "UAV alone: " << detail::fmt_num(res.uav_alone) << "\nADR alone: " << detail::fmt_num(res.adr_alone) << '\n';
    for (const auto& note : res.notes) summary << note << '\n';
    write_text(dir / "coalition_summary.txt", summary.str());
    std::cout << summary.str();
    write_sweep_csv(std::cout, res);
    return 0;
}

int cmd_toy(const std::string& out) {
    const ToyReport r = run_toy();
    std::ostringstream text;
    char line[256];
    for (const auto& f : r.figures) {
        if (f.reference) std::snprintf(line, sizeof line, "%-50s %8.4f   (reference %.2f)\n", f.label.c_str(), f.value, *f.reference);
        else std::snprintf(line, sizeof line, "%-50s %8.4f\n", f.label.c_str(), f.value);
        text << line;
    }
    text << "\ncoalition table (singletons from the routes above, larger coalitions solved exactly)\n";
    write_table_summary(text, r.table);
    std::cout << text.str();
    if (!out.empty()) {
        const fs::path dir = prepare_dir(out);
        nlohmann::json figs = nlohmann::json::array();
        for (const auto& f : r.figures)
            figs.push_back({{"label", f.label},
                            {"value", f.value},
                            {"reference", f.reference ? nlohmann::json(*f.reference) : nlohmann::json(nullptr)}});
        detail::write_json_file((dir / "toy.json").string(), {{"figures", figs}});
        write_text(dir / "toy.txt", text.str());
    }
    log(Level::Debug, "toy example took " + std::to_string(r.seconds) + "s");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cooperative pickup and delivery with drones and ground robots"};
    app.require_subcommand(1);

    int customers = 10, depots = 2;
    double area = 5.0;
    std::string profile = "uniform", gen_out;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("gen", "generate a random instance");
    gen->add_option("--customers", customers)->check(CLI::PositiveNumber);
    gen->add_option("--depots", depots)->check(CLI::PositiveNumber);
    gen->add_option("--area", area, "side of the square service area in km")->check(CLI::PositiveNumber);
    gen->add_option("--profile", profile, "uniform, poisson-peak or tight");
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out, "instance JSON path (stdout when omitted)");

    Common solve_opts;
    std::string solver;
    auto* solve_cmd = app.add_subcommand("solve", "solve a scenario exactly and/or heuristically");
    add_common(solve_cmd, solve_opts);
    solve_cmd->add_option("--solver", solver)->check(CLI::IsMember({"exact", "heuristic", "both"}));

    Common roll_opts;
    std::string strategy, weights;
    auto* roll_cmd = app.add_subcommand("rollout", "run one episode with the greedy or attention scorer");
    add_common(roll_cmd, roll_opts);
    roll_cmd->add_option("--strategy", strategy, "paired, uav-prior or adr-prior");
    roll_cmd->add_option("--weights", weights, "attention weight file")->check(CLI::ExistingFile);

    Common coal_opts;
    int m = 2, n = 2;
    auto* coal_cmd = app.add_subcommand("coalition", "sweep coalitions of m UAVs and n ADRs");
    add_common(coal_cmd, coal_opts);
    coal_cmd->add_option("--m", m, "number of UAVs")->check(CLI::PositiveNumber);
    coal_cmd->add_option("--n", n, "number of ADRs")->check(CLI::PositiveNumber);

    std::string toy_out;
    auto* toy_cmd = app.add_subcommand("toy", "reproduce the three-customer worked example");
    toy_cmd->add_option("--out", toy_out, "directory for toy.json and toy.txt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        fail("usage", "", e.what(), 2);
    }

    try {
        if (*gen) return cmd_gen(customers, depots, area, profile, gen_seed, gen_out);
        if (*solve_cmd) return cmd_solve(solve_opts, solver);
        if (*roll_cmd) return cmd_rollout(roll_opts, strategy, weights);
        if (*coal_cmd) return cmd_coalition(coal_opts, m, n);
        if (*toy_cmd) return cmd_toy(toy_out);
    } catch (const ParseError& e) {
        fail("parse", e.field(), e.what());
    } catch (const ContractViolation& e) {
        fail("contract", "", e.what());
    } catch (const NumericError& e) {
        fail("numeric", "", e.what());
    } catch (const nlohmann::json::exception& e) {
        fail("parse", "", e.what());
    } catch (const std::exception& e) {
        fail("error", "", e.what());
    }
    return 0;
}
