#include <gtest/gtest.h>

#include "cpdptw/cpdptw.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cpdptw;

namespace {

std::vector<Visit> trace(const Simulator& sim, int k, const std::vector<int>& nodes) {
    VehicleState vs = initial_vehicle_state(sim, k);
    std::vector<Visit> out;
    for (int n : nodes) out.push_back(sim.advance(k, vs, n));
    return out;
}

Solution assemble(const Simulator& sim, std::vector<std::vector<Visit>> routes) {
    Solution sol;
    for (const auto& v : sim.fleet().vehicles) sol.start_depots.push_back(v.start_depot);
    sol.routes = std::move(routes);
    sol.cost = episode_cost(sol, sim.instance(), sim.fleet());
    return sol;
}

bool has(const std::vector<Violation>& vs, const std::string& what) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) { return v.constraint == what; });
}

Instance pair_instance(double demand = 2) {
    Instance inst;
    inst.area_km = 2.0;
    inst.customers = {{0, {0.5, 0.0}, {1.0, 0.0}, 0.0, 60.0, demand}};
    inst.depots = {{2, {0.0, 0.0}, true}};
    return inst;
}

}  // namespace

TEST(Solver, ExactMatchesEnumerationOnSmallCases) {
    for (int seed = 0; seed < 64; seed += 3) {
        const auto c = fixtures::small_case(seed);
        const Simulator sim = fixtures::simulator(c);
        const auto rep = solve_exact(sim);
        const double ref = oracle::enumerate_optimum(sim);
        if (ref == kInf) {
            EXPECT_FALSE(rep.feasible) << seed;
            continue;
        }
        ASSERT_TRUE(rep.feasible) << seed;
        EXPECT_TRUE(rep.proven_optimal);
        EXPECT_NEAR(rep.solution.cost.total, ref, 1e-9) << seed;
        EXPECT_TRUE(validate(rep.solution, sim).empty()) << seed;
        EXPECT_LE(rep.lower_bound, rep.solution.cost.total + 1e-9);
    }
}

TEST(Solver, WarmStartDoesNotChangeTheOptimum) {
    for (int seed = 1; seed < 40; seed += 5) {
        const Simulator sim = fixtures::simulator(fixtures::small_case(seed));
        const auto warm = solve_exact(sim, {}, true);
        const auto cold = solve_exact(sim, {}, false);
        ASSERT_EQ(warm.feasible, cold.feasible);
        if (warm.feasible) EXPECT_NEAR(warm.solution.cost.total, cold.solution.cost.total, 1e-9);
    }
}

TEST(Solver, HeuristicNeverBeatsExact) {
    for (int seed = 0; seed < 60; seed += 2) {
        const Simulator sim = fixtures::simulator(fixtures::small_case(seed));
        const auto e = solve_exact(sim);
        const auto h = solve_heuristic(sim);
        if (h.feasible) {
            ASSERT_TRUE(e.feasible);
            EXPECT_GE(h.solution.cost.total, e.solution.cost.total - 1e-9);
            EXPECT_TRUE(validate(h.solution, sim).empty());
        }
    }
}

TEST(Solver, SingleCustomerBothSolversAgree) {
    const Instance inst = pair_instance();
    const Simulator sim(inst, make_fleet(inst, 1, 1), build_network(inst));
    const auto e = solve_exact(sim);
    const auto h = solve_heuristic(sim);
    ASSERT_TRUE(e.feasible);
    ASSERT_TRUE(h.feasible);
    EXPECT_NEAR(e.solution.cost.total, h.solution.cost.total, 1e-9);
    // the ADR is cheaper per minute and the window is wide
    EXPECT_TRUE(e.solution.routes[0].empty());
    EXPECT_EQ(e.solution.routes[1].size(), 3u);
}

TEST(Solver, RechargeStopWhenBatteryIsShort) {
    Instance inst;
    inst.area_km = 4.0;
    inst.customers = {{0, {0.0, 4.0}, {4.0, 4.0}, 0.0, 300.0, 1}};
    inst.depots = {{2, {0.0, 0.0}, true}, {3, {2.0, 4.0}, true}};
    FleetSpec fleet = make_fleet(inst, 0, 1);
    const Simulator probe(inst, fleet, build_network(inst));
    const double direct = probe.leg_energy(0, 2, 0, 0) + probe.leg_energy(0, 0, 1, 1) + probe.return_energy(0, 1, 0);
    fleet.vehicles[0].battery = direct * 0.8;
    fleet.vehicles[0].battery_floor = 0.0;
    const Simulator sim(inst, fleet, build_network(inst));
    const auto rep = solve_exact(sim);
    ASSERT_TRUE(rep.feasible);
    int depots_mid_route = 0;
    const auto& route = rep.solution.routes[0];
    for (std::size_t i = 0; i + 1 < route.size(); ++i) depots_mid_route += inst.is_depot(route[i].node);
    EXPECT_GE(depots_mid_route, 1);
    EXPECT_TRUE(validate(rep.solution, sim).empty());
    EXPECT_NEAR(rep.solution.cost.total, oracle::enumerate_optimum(sim), 1e-9);
}

TEST(Solver, InfeasibleInstanceIsReported) {
    const Instance inst = pair_instance(20);  // heavier than any vehicle can carry
    const Simulator sim(inst, make_fleet(inst, 1, 1), build_network(inst));
    const auto e = solve_exact(sim);
    EXPECT_FALSE(e.feasible);
    EXPECT_EQ(e.status, "infeasible");
    EXPECT_FALSE(solve_heuristic(sim).feasible);
}

TEST(Solver, ValidateFlagsEachConstraint) {
    const Instance inst = pair_instance(2);
    const Simulator sim(inst, make_fleet(inst, 1, 1), build_network(inst));
    EXPECT_TRUE(validate(assemble(sim, {trace(sim, 0, {0, 1, 2}), {}}), sim).empty());

    EXPECT_TRUE(has(validate(assemble(sim, {trace(sim, 0, {0, 1, 2})}), sim), "fleet"));
    EXPECT_TRUE(has(validate(assemble(sim, {trace(sim, 0, {0, 1}), {}}), sim), "route-end"));
    EXPECT_TRUE(has(validate(assemble(sim, {trace(sim, 0, {1, 0, 2}), {}}), sim), "precedence"));
    EXPECT_TRUE(has(validate(assemble(sim, {{}, {}}), sim), "served-once"));
    EXPECT_TRUE(has(validate(assemble(sim, {trace(sim, 0, {0, 2}), trace(sim, 1, {1, 2})}), sim), "same-vehicle"));
    EXPECT_TRUE(has(validate(assemble(sim, {trace(sim, 0, {0, 1, 0, 1, 2}), {}}), sim), "served-once"));

    auto tampered = trace(sim, 0, {0, 1, 2});
    tampered[1].arrival -= 1.0;
    EXPECT_TRUE(has(validate(assemble(sim, {tampered, {}}), sim), "consistency"));

    auto bad_node = trace(sim, 0, {0, 1, 2});
    bad_node[0].node = 17;
    EXPECT_TRUE(has(validate(assemble(sim, {bad_node, {}}), sim), "node"));

    const Instance heavy = pair_instance(8);
    const Simulator hsim(heavy, make_fleet(heavy, 1, 1), build_network(heavy));
    EXPECT_TRUE(has(validate(assemble(hsim, {trace(hsim, 0, {0, 1, 2}), {}}), hsim), "capacity"));

    Instance late = pair_instance(2);
    late.customers[0].late = 0.5;
    const Simulator lsim(late, make_fleet(late, 1, 1), build_network(late));
    EXPECT_TRUE(has(validate(assemble(lsim, {{}, trace(lsim, 1, {0, 1, 2})}), lsim), "pickup-window"));

    FleetSpec weak = make_fleet(inst, 1, 1);
    weak.vehicles[0].battery = 0.2;
    const Simulator wsim(inst, weak, build_network(inst));
    EXPECT_TRUE(has(validate(assemble(wsim, {trace(wsim, 0, {0, 1, 2}), {}}), wsim), "battery-floor"));

    const DualNetwork blocked = build_network(inst, {}, {kInf, kInf, 1.0, 0});
    const Simulator bsim(inst, make_fleet(inst, 1, 1), blocked);
    EXPECT_TRUE(has(validate(assemble(bsim, {trace(bsim, 0, {0, 1, 2}), {}}), bsim), "reachability"));
}

TEST(Solver, NodeLimitStopsSearch) {
    const Simulator sim = fixtures::simulator(fixtures::small_case(3));
    const auto rep = solve_exact(sim, {1, 60.0, 0.0}, false);
    EXPECT_FALSE(rep.proven_optimal);
}

TEST(Solver, AutoPicksBySize) {
    const Simulator small = fixtures::simulator(fixtures::small_case(2));
    EXPECT_TRUE(solve(small, SolverKind::Auto).proven_optimal || !solve(small, SolverKind::Auto).feasible);
    EXPECT_EQ(solver_kind_from_string("heuristic"), SolverKind::Heuristic);
    EXPECT_THROW(solver_kind_from_string("magic"), std::invalid_argument);
}

TEST(Solver, HeuristicIsSeedDeterministic) {
    const Instance inst = generate(8, 2, 3.0, WindowProfile::Uniform, 5);
    const Simulator sim(inst, make_fleet(inst, 2, 2), build_network(inst));
    const auto a = solve_heuristic(sim, {}, {4, 9});
    const auto b = solve_heuristic(sim, {}, {4, 9});
    ASSERT_TRUE(a.feasible);
    EXPECT_EQ(to_json(a.solution, inst).dump(), to_json(b.solution, inst).dump());
}

TEST(Solver, GapHelpers) {
    EXPECT_DOUBLE_EQ(gap(11.0, 10.0), 0.1);
    EXPECT_DOUBLE_EQ(mean_gap({11.0, 12.0}, {10.0, 10.0}), 0.15);
    EXPECT_THROW(gap(1.0, 0.0), ContractViolation);
    EXPECT_THROW(mean_gap({}, {}), ContractViolation);
}
