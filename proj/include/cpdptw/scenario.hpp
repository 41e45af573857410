#pragma once

// Batch scenario files, wind presets, and the three-customer hand-worked example.

#include <filesystem>

#include "cpdptw/coalition.hpp"
#include "cpdptw/json_util.hpp"
#include "cpdptw/policy.hpp"

namespace cpdptw {

inline WindState wind_preset(std::string_view name, std::uint64_t seed = 0) {
    if (name == "none") return {};
    if (name == "eastward") return {12.0, 0.0, WindModel::Constant, seed};
    if (name == "westward") return {12.0, std::numbers::pi, WindModel::Constant, seed};
    if (name == "turbulent") return {10.0, 0.0, WindModel::Turbulent, seed};
    throw std::invalid_argument("unknown wind preset '" + std::string(name) + "'");
}

struct GeneratorArgs {
    int customers = 10;
    int depots = 2;
    double area_km = 5.0;
    WindowProfile profile = WindowProfile::Uniform;
};

struct Scenario {
    std::uint64_t seed = 0;
    std::optional<std::string> instance_file;
    GeneratorArgs generator;
    std::optional<FleetSpec> fleet;  // explicit vehicles
    int n_uav = 2, n_adr = 2;        // used when no explicit fleet is given
    NetworkOptions network;
    PhysicsConfig physics;
    AdjacencySpec adjacency;
    bool neighborhood_mask = false;
    std::optional<CostWeights> cost_weights;
    std::string solver = "both";  // exact | heuristic | both
    SolverLimits limits;
    int restarts = 8;
    Strategy strategy = Strategy::Paired;
    std::optional<std::string> weights_file;  // attention scorer; greedy when absent
    std::string output_dir = "out";
};

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

inline WindState wind_from_json(const json& j, std::uint64_t seed) {
    if (j.is_string()) {
        try {
            return wind_preset(j.get<std::string>(), seed);
        } catch (const std::invalid_argument& e) {
            throw ParseError("wind", e.what());
        }
    }
    WindState w;
    w.speed = require<double>(j, "speed", "wind");
    w.course = require<double>(j, "course", "wind");
    const auto model = optional_field<std::string>(j, "model", "wind", "constant");
    if (model == "none") w.model = WindModel::None;
    else if (model == "constant") w.model = WindModel::Constant;
    else if (model == "turbulent") w.model = WindModel::Turbulent;
    else throw ParseError("wind.model", "expected none|constant|turbulent");
    w.seed = seed;
    return w;
}

}  // namespace detail

/// Parses a scenario document. Relative paths are resolved against `base_dir`.
inline Scenario scenario_from_json(const nlohmann::json& doc, const std::string& base_dir = ".") {
    using detail::optional_field;
    using detail::require;
    detail::require_version(doc, "format_version", 1);
    Scenario s;
    s.seed = require<std::uint64_t>(doc, "seed", "");
    const std::filesystem::path base(base_dir);
    const auto inst = require<nlohmann::json>(doc, "instance", "");
    if (inst.contains("file")) {
        s.instance_file = detail::resolve(base, require<std::string>(inst, "file", "instance"));
        if (!std::filesystem::exists(*s.instance_file)) throw ParseError("instance.file", "file not found: " + *s.instance_file);
    } else {
        const auto g = require<nlohmann::json>(inst, "generate", "instance");
        s.generator.customers = require<int>(g, "customers", "instance.generate");
        s.generator.depots = optional_field<int>(g, "depots", "instance.generate", 2);
        s.generator.area_km = optional_field<double>(g, "area_km", "instance.generate", 5.0);
        try {
            s.generator.profile = window_profile_from_string(optional_field<std::string>(g, "profile", "instance.generate", "uniform"));
        } catch (const std::invalid_argument& e) {
            throw ParseError("instance.generate.profile", e.what());
        }
    }
    if (doc.contains("fleet")) {
        const auto& f = doc["fleet"];
        if (f.contains("vehicles")) {
            s.fleet = fleet_from_json(f);
        } else {
            s.n_uav = require<int>(f, "uav", "fleet");
            s.n_adr = require<int>(f, "adr", "fleet");
        }
    }
    if (doc.contains("network")) {
        const auto& n = doc["network"];
        s.network.road_grid = optional_field<bool>(n, "road_grid", "network", false);
        s.network.grid_spacing_km = optional_field<double>(n, "grid_spacing_km", "network", 0.5);
        s.network.uav_direct = optional_field<bool>(n, "uav_direct", "network", true);
    }
    if (doc.contains("wind")) s.physics.wind = detail::wind_from_json(doc["wind"], s.seed);
    const auto formula = optional_field<std::string>(doc, "wind_formula", "", "vector");
    if (formula == "vector") s.physics.wind_formula = WindFormula::Vector;
    else if (formula == "verbatim") s.physics.wind_formula = WindFormula::Verbatim;
    else throw ParseError("wind_formula", "expected vector|verbatim");
    if (doc.contains("adjacency")) {
        const auto& a = doc["adjacency"];
        auto num = [&](const char* key, double fallback) {
            if (!a.contains(key) || a[key].is_null()) return fallback;
            return require<double>(a, key, "adjacency");
        };
        s.adjacency.zeta = num("zeta", kInf);
        s.adjacency.mu = num("mu", kInf);
        s.adjacency.rho = num("rho", 0.0);
        s.adjacency.seed = s.seed;
        try {
            check_spec(s.adjacency);
        } catch (const ContractViolation& e) {
            throw ParseError("adjacency", e.what());
        }
        s.neighborhood_mask = optional_field<bool>(a, "mask", "adjacency", false);
    }
    if (doc.contains("cost_weights")) s.cost_weights = cost_weights_from_json(doc["cost_weights"], "cost_weights");
    s.solver = optional_field<std::string>(doc, "solver", "", "both");
    if (s.solver != "exact" && s.solver != "heuristic" && s.solver != "both")
        throw ParseError("solver", "expected exact|heuristic|both");
    if (doc.contains("limits")) {
        const auto& l = doc["limits"];
        s.limits.max_nodes = optional_field<long>(l, "max_nodes", "limits", s.limits.max_nodes);
        s.limits.time_budget_s = optional_field<double>(l, "time_budget_s", "limits", s.limits.time_budget_s);
        s.limits.gap_target = optional_field<double>(l, "gap_target", "limits", 0.0);
    }
    s.restarts = optional_field<int>(doc, "restarts", "", 8);
    try {
        s.strategy = strategy_from_string(optional_field<std::string>(doc, "strategy", "", "paired"));
    } catch (const std::invalid_argument& e) {
        throw ParseError("strategy", e.what());
    }
    if (doc.contains("weights")) {
        s.weights_file = detail::resolve(base, require<std::string>(doc, "weights", ""));
        if (!std::filesystem::exists(*s.weights_file)) throw ParseError("weights", "file not found: " + *s.weights_file);
    }
    s.output_dir = optional_field<std::string>(doc, "output_dir", "", "out");
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    return scenario_from_json(detail::read_json_file(path), std::filesystem::path(path).parent_path().string());
}

inline Instance scenario_instance(const Scenario& s) {
    Instance inst = s.instance_file ? load_instance(*s.instance_file)
                                    : generate(s.generator.customers, s.generator.depots, s.generator.area_km,
                                               s.generator.profile, s.seed);
    if (s.cost_weights) inst.cost_weights = *s.cost_weights;
    return inst;
}

inline FleetSpec scenario_fleet(const Scenario& s, const Instance& inst) {
    return s.fleet ? *s.fleet : make_fleet(inst, s.n_uav, s.n_adr);
}

// ---------------------------------------------------------------------------
// Hand-worked example: one depot, three customers, one ADR and two UAVs. Distances are in
// kilometre-sized grid units, the ADR covers one unit per minute and the UAVs three.

inline Instance toy_instance() {
    Instance inst;
    inst.area_km = 10.0;
    inst.service_time = 0.0;
    inst.customers = {
        {0, {1, 2}, {4, 5}, 3.0, 10.0, 4.0},
        {1, {2, 1}, {5, 3}, 5.0, 12.0, 1.0},
        {2, {3, 4}, {6, 2}, 5.0, 13.0, 2.5},
    };
    inst.depots = {{6, {0, 0}, true}};
    inst.cost_weights = {1.0, 1.0, 0.0, 5.0, 0.0};
    inst.rules = {false, false};
    return inst;
}

/// Fleet order is ADR, UAV 1, UAV 2. Batteries are large enough never to bind.
inline FleetSpec toy_fleet() {
    const int depot = 6;
    const VehicleSpec adr{Mode::ADR, 1000.0 / 60.0, 5.0, 1e9, 1.0, 0.0, depot};
    const VehicleSpec uav{Mode::UAV, 3000.0 / 60.0, 10.0, 1e9, 1.0, 0.0, depot};
    return {{adr, uav, uav}};
}

inline PhysicsConfig toy_physics() {
    PhysicsConfig p;
    p.depot_speed_factor = 1.0;
    return p;
}

inline Simulator toy_simulator(const FleetSpec& fleet) {
    const Instance inst = toy_instance();
    return Simulator(inst, fleet, build_network(inst), toy_physics());
}

/// The reference single-vehicle routes (pickups 0..2 = A..C, deliveries 3..5, depot 6).
inline const std::vector<int> kToyAdrRoute{0, 1, 3, 2, 4, 5, 6};
inline const std::vector<int> kToyD1Route{0, 3, 1, 4, 2, 5, 6};
inline const std::vector<int> kToyD2Route{0, 1, 3, 4, 2, 5, 6};

/// Steps a route through the simulator (mask-checked) and returns the resulting solution.
inline Solution replay_routes(const Simulator& sim, const std::vector<std::vector<int>>& routes) {
    SimState s = sim.reset();
    for (std::size_t k = 0; k < routes.size(); ++k)
        for (int node : routes[k]) s = sim.step(s, {static_cast<int>(k), node});
    return solution_from_state(sim, s, sim.terminal(s));
}

struct ToyFigure {
    std::string label;
    double value = 0.0;
    std::optional<double> reference;
};

struct ToyReport {
    double adr = 0.0, d1 = 0.0, d2 = 0.0;
    double separate = 0.0;
    double cooperative = 0.0;        // reference accounting: R on B, D1 on A, D2's whole-route figure
    double cooperative_split = 0.0;  // R on B, D1 on A, D2 on C only
    double mode_uav_pair = 0.0;      // D1 on C, D2 on A and B
    double mode_total = 0.0;
    double delay_c = 0.0;            // ADR delay at C's delivery (minutes)
    double adr_exact = 0.0;
    double grand_exact = 0.0;
    CoalitionTable table;
    double seconds = 0.0;
    std::vector<ToyFigure> figures;
};

inline ToyReport run_toy() {
    const auto t0 = std::chrono::steady_clock::now();
    const FleetSpec fleet = toy_fleet();
    auto single = [&](int k) { return FleetSpec{{fleet.vehicles[k]}}; };
    const Simulator sim_r = toy_simulator(single(0));
    const Simulator sim_d1 = toy_simulator(single(1));
    const Simulator sim_d2 = toy_simulator(single(2));
    const Simulator sim_all = toy_simulator(fleet);
    const Simulator sim_uavs = toy_simulator(FleetSpec{{fleet.vehicles[1], fleet.vehicles[2]}});

    ToyReport r;
    const Solution adr = replay_routes(sim_r, {kToyAdrRoute});
    r.adr = adr.cost.total;
    r.delay_c = adr.routes[0][5].arrival - toy_instance().customers[2].late;
    r.d1 = replay_routes(sim_d1, {kToyD1Route}).cost.total;
    r.d2 = replay_routes(sim_d2, {kToyD2Route}).cost.total;
    r.separate = r.adr + r.d1 + r.d2;
    const double r_on_b = replay_routes(sim_r, {{1, 4, 6}}).cost.total;
    const double d1_on_a = replay_routes(sim_d1, {{0, 3, 6}}).cost.total;
    r.cooperative = r_on_b + d1_on_a + r.d2;
    r.cooperative_split = replay_routes(sim_all, {{1, 4, 6}, {0, 3, 6}, {2, 5, 6}}).cost.total;
    r.mode_uav_pair = replay_routes(sim_uavs, {{2, 5, 6}, {0, 1, 3, 4, 6}}).cost.total;
    r.mode_total = r.adr + r.mode_uav_pair;
    r.adr_exact = solve_exact(sim_r).solution.cost.total;
    r.grand_exact = solve_exact(sim_all).solution.cost.total;

    CoalitionSetup cfg{toy_instance(), fleet, build_network(toy_instance()), toy_physics(), SolverKind::Exact, {}, {}};
    // singletons are the reference route costs; larger coalitions come from the exact solver
    cfg.fixed = {{0b001, r.adr}, {0b010, r.d1}, {0b100, r.d2}};
    r.table = compose_table({"R", "D1", "D2"}, [&](Coalition s) {
        return std::popcount(s) == 1 ? cfg.fixed.at(s) : direct_cost(cfg, s);
    });
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.figures = {
        {"C^R (ADR alone)", r.adr, 14.08},
        {"C^D1 (UAV 1 alone)", r.d1, 6.80},
        {"C^D2 (UAV 2 alone)", r.d2, 5.41},
        {"separate total", r.separate, 26.29},
        {"cooperative total (R:B + D1:A + D2 route figure)", r.cooperative, 13.38},
        {"cooperative with D2 serving C only", r.cooperative_split, std::nullopt},
        {"ADR delay at D_C (min)", r.delay_c, std::nullopt},
        {"ADR delay penalty at D_C", 5.0 * r.delay_c, std::nullopt},
        {"mode coalition C^{D1,D2}", r.mode_uav_pair, 6.33},
        {"mode coalition total C^R + C^{D1,D2}", r.mode_total, 20.04},
        {"ADR alone, exact optimum", r.adr_exact, std::nullopt},
        {"grand coalition, exact optimum", r.grand_exact, std::nullopt},
    };
    return r;
}

}  // namespace cpdptw
