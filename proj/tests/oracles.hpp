#pragma once

// Independent reference implementations used only by the tests.

#include <cmath>
#include <functional>
#include <vector>

#include "cpdptw/cpdptw.hpp"

namespace oracle {

using namespace cpdptw;

/// Floyd-Warshall over a mode graph; all-pairs shortest distances in metres.
inline std::vector<std::vector<double>> all_pairs(const ModeGraph& g) {
    const int n = g.n_nodes();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
    for (int i = 0; i < n; ++i) d[i][i] = 0.0;
    for (const Edge& e : g.edges())
        if (e.allowed) d[e.from][e.to] = std::min(d[e.from][e.to], e.length_m);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

/// Best single-vehicle route cost for every customer subset, by exhaustive search. A route
/// visits its customers' pickups and deliveries, may stop at a depot between customer nodes,
/// and ends at a depot. Only feasibility prunes the search.
inline std::vector<double> best_routes_by_subset(const Simulator& sim, int k) {
    const Instance& inst = sim.instance();
    const VehicleSpec& spec = sim.vehicle(k);
    const int N = inst.n_customers();
    const int D = static_cast<int>(inst.depots.size());
    std::vector<double> best(std::size_t{1} << N, kInf);
    best[0] = 0.0;

    auto ok = [&](const VehicleState& vs, int node) {
        const double t = sim.travel_time(k, vs.position, node);
        if (!std::isfinite(t)) return false;
        const double batt = vs.battery - sim.leg_energy(k, vs.position, node, vs.load);
        if (batt < spec.battery_floor * spec.battery - 1e-9) return false;
        if (inst.is_pickup(node)) {
            if (vs.load + inst.customers[node].demand > spec.capacity + 1e-9) return false;
            double start = vs.clock + t;
            if (inst.rules.wait_for_pickup) start = std::max(start, inst.customers[node].early);
            if (start > inst.customers[node].late + 1e-9) return false;
        }
        return true;
    };

    std::vector<Visit> route;
    std::function<void(const VehicleState&, unsigned, unsigned)> dfs = [&](const VehicleState& vs, unsigned picked,
                                                                           unsigned dropped) {
        const bool at_depot = inst.is_depot(vs.position);
        if (!route.empty() && at_depot && picked == dropped) {
            const double c = route_cost(inst, spec, route).total;
            best[picked] = std::min(best[picked], c);
        }
        for (int c = 0; c < N; ++c) {
            if (!(picked >> c & 1)) {
                const int node = inst.pickup_node(c);
                if (!ok(vs, node)) continue;
                VehicleState next = vs;
                route.push_back(sim.advance(k, next, node));
                dfs(next, picked | 1u << c, dropped);
                route.pop_back();
            } else if (!(dropped >> c & 1)) {
                const int node = inst.delivery_node(c);
                if (!ok(vs, node)) continue;
                VehicleState next = vs;
                route.push_back(sim.advance(k, next, node));
                dfs(next, picked, dropped | 1u << c);
                route.pop_back();
            }
        }
        if (!route.empty() && !at_depot)
            for (int d = 0; d < D; ++d) {
                const int node = inst.depot_node(d);
                if (!ok(vs, node)) continue;
                VehicleState next = vs;
                route.push_back(sim.advance(k, next, node));
                dfs(next, picked, dropped);
                route.pop_back();
            }
    };
    VehicleState start;
    start.position = spec.start_depot;
    start.battery = spec.battery;
    start.min_battery = spec.battery;
    dfs(start, 0, 0);
    return best;
}

/// Optimal fleet cost: best assignment of customer subsets to vehicles.
inline double enumerate_optimum(const Simulator& sim) {
    const int N = sim.instance().n_customers();
    const unsigned full = (1u << N) - 1;
    std::vector<double> acc(full + 1, kInf);
    acc[0] = 0.0;
    for (int k = 0; k < sim.n_vehicles(); ++k) {
        const auto routes = best_routes_by_subset(sim, k);
        std::vector<double> next(full + 1, kInf);
        for (unsigned s = 0; s <= full; ++s) {
            for (unsigned sub = s;; sub = (sub - 1) & s) {
                next[s] = std::min(next[s], acc[s ^ sub] + routes[sub]);
                if (sub == 0) break;
            }
        }
        acc = std::move(next);
    }
    return acc[full];
}

/// Core membership by brute force over allocations on a 0.01 grid (integer cents), for 2 or 3
/// agents. Returns true when some grid allocation satisfies every constraint.
inline bool grid_core_nonempty(const CoalitionTable& t) {
    const int n = t.n_agents();
    auto cents = [](double v) { return std::llround(v * 100.0); };
    const long long total = cents(t.cost.back());
    auto fits = [&](const std::vector<long long>& x) {
        for (Coalition s = 1; s + 1 < t.cost.size(); ++s) {
            if (t.cost[s] == kInf) continue;
            long long sum = 0;
            for (int k = 0; k < n; ++k)
                if (s >> k & 1) sum += x[k];
            if (sum > cents(t.cost[s])) return false;
        }
        return true;
    };
    // each share lies between C(N) - C(N \ {i}) and C({i})
    std::vector<long long> lo(n), hi(n);
    const Coalition full = grand_coalition(n);
    for (int k = 0; k < n; ++k) {
        const double single = t.cost[Coalition{1} << k];
        const double rest = t.cost[full ^ (Coalition{1} << k)];
        hi[k] = single == kInf ? total + 100000 : cents(single);
        lo[k] = rest == kInf ? -100000 : total - cents(rest);
    }
    if (n == 2) {
        for (long long a = lo[0]; a <= hi[0]; ++a)
            if (fits({a, total - a})) return true;
        return false;
    }
    for (long long a = lo[0]; a <= hi[0]; ++a)
        for (long long b = lo[1]; b <= hi[1]; ++b)
            if (fits({a, b, total - a - b})) return true;
    return false;
}

/// Energy used by UAV legs of a solution, from the battery trace.
inline double uav_energy(const Solution& sol, const Simulator& sim) {
    double total = 0.0;
    for (std::size_t k = 0; k < sol.routes.size(); ++k) {
        if (sim.vehicle(static_cast<int>(k)).mode != Mode::UAV) continue;
        double before = sim.vehicle(static_cast<int>(k)).battery;
        for (const Visit& v : sol.routes[k]) {
            total += before - v.battery_arrival;
            before = v.battery_after;
        }
    }
    return total;
}

}  // namespace oracle
