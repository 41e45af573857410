#pragma once

// Offline solvers for the full MIP: depth-first branch and bound for small instances and an
// insertion + local search heuristic for larger ones, plus an independent solution checker.
//
// Solvers treat the battery floor as hard at every arrival, including depots.

#include <chrono>
#include <numeric>
#include <random>

#include "cpdptw/env.hpp"

namespace cpdptw {

struct SolverLimits {
    long max_nodes = 20'000'000;
    double time_budget_s = 120.0;
    double gap_target = 0.0;
};

struct SolveReport {
    Solution solution;
    bool feasible = false;
    bool proven_optimal = false;
    double lower_bound = 0.0;
    long nodes = 0;
    double seconds = 0.0;
    std::string status;  // optimal | feasible | infeasible | limit
};

enum class SolverKind { Exact, Heuristic, Auto };

inline SolverKind solver_kind_from_string(std::string_view s) {
    if (s == "exact") return SolverKind::Exact;
    if (s == "heuristic") return SolverKind::Heuristic;
    if (s == "auto") return SolverKind::Auto;
    throw std::invalid_argument("unknown solver '" + std::string(s) + "'");
}

inline double mode_weight(const Instance& inst, Mode m) {
    return m == Mode::UAV ? inst.cost_weights.alpha1 : inst.cost_weights.alpha2;
}

/// Whether vehicle k in state vs may move to `node` under the hard constraints.
inline bool hard_step_ok(const Simulator& sim, int k, const VehicleState& vs, int node) {
    const Instance& inst = sim.instance();
    const VehicleSpec& spec = sim.vehicle(k);
    const double travel = sim.travel_time(k, vs.position, node);
    if (travel == kInf) return false;
    if (inst.is_pickup(node)) {
        if (vs.load + inst.node_demand(node) > spec.capacity + 1e-9) return false;
        const double arrival = vs.clock + travel;
        const double start = inst.rules.wait_for_pickup ? std::max(arrival, inst.node_early(node)) : arrival;
        if (start > inst.node_late(node) + 1e-9) return false;
    }
    const double battery = vs.battery - sim.leg_energy(k, vs.position, node, vs.load);
    return battery >= spec.battery_floor * spec.battery - 1e-9;
}

inline VehicleState initial_vehicle_state(const Simulator& sim, int k) {
    VehicleState vs;
    vs.position = sim.vehicle(k).start_depot;
    vs.battery = sim.vehicle(k).battery;
    vs.min_battery = vs.battery;
    return vs;
}

namespace detail {

inline Solution assemble(const Simulator& sim, std::vector<std::vector<Visit>> routes) {
    Solution sol;
    for (const auto& v : sim.fleet().vehicles) sol.start_depots.push_back(v.start_depot);
    sol.routes = std::move(routes);
    for (std::size_t k = 0; k < sol.routes.size(); ++k)
        for (const Visit& v : sol.routes[k]) sol.actions.push_back({static_cast<int>(k), v.node});
    sol.complete = true;
    sol.cost = episode_cost(sol, sim.instance(), sim.fleet());
    return sol;
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Heuristic

/// Simulates a vehicle over customer nodes in order, inserting the best depot stop whenever the
/// next leg would break the battery floor or leave no depot within reach, and closing at the
/// cheapest reachable depot.
inline std::optional<std::vector<Visit>> build_route(const Simulator& sim, int k, const std::vector<int>& seq) {
    std::vector<Visit> visits;
    if (seq.empty()) return visits;
    const Instance& inst = sim.instance();
    const int n_depots = static_cast<int>(inst.depots.size());
    VehicleState vs = initial_vehicle_state(sim, k);
    auto stranded_after = [&](const VehicleState& from, int node) {
        VehicleState probe = from;
        sim.advance(k, probe, node);
        const double floor = sim.vehicle(k).battery_floor * sim.vehicle(k).battery;
        return probe.battery - sim.return_energy(k, node, probe.load) < floor - 1e-9;
    };
    for (int node : seq) {
        const bool step_ok = hard_step_ok(sim, k, vs, node);
        if (!step_ok || stranded_after(vs, node)) {
            if (inst.is_depot(vs.position)) {
                if (!step_ok) return std::nullopt;
                visits.push_back(sim.advance(k, vs, node));
                continue;
            }
            std::optional<VehicleState> best;
            Visit best_visit;
            double best_arrival = kInf;
            for (int d = 0; d < n_depots; ++d) {
                const int dn = inst.depot_node(d);
                if (!hard_step_ok(sim, k, vs, dn)) continue;
                VehicleState trial = vs;
                const Visit dv = sim.advance(k, trial, dn);
                if (!hard_step_ok(sim, k, trial, node)) continue;
                const double arrival = trial.clock + sim.travel_time(k, dn, node);
                if (arrival < best_arrival) {
                    best_arrival = arrival;
                    best = trial;
                    best_visit = dv;
                }
            }
            if (best) {
                vs = *best;
                visits.push_back(best_visit);
            } else if (!step_ok) {
                return std::nullopt;
            }
        }
        visits.push_back(sim.advance(k, vs, node));
    }
    const double w = mode_weight(inst, sim.vehicle(k).mode);
    std::optional<VehicleState> best;
    Visit best_visit;
    double best_cost = kInf;
    for (int d = 0; d < n_depots; ++d) {
        const int dn = inst.depot_node(d);
        if (!hard_step_ok(sim, k, vs, dn)) continue;
        const double c = inst.rules.charge_final_return ? w * sim.travel_time(k, vs.position, dn) : 0.0;
        if (c < best_cost) {
            best_cost = c;
            VehicleState trial = vs;
            best_visit = sim.advance(k, trial, dn);
            best = trial;
        }
    }
    if (!best) return std::nullopt;
    visits.push_back(best_visit);
    return visits;
}

struct HeuristicOptions {
    int restarts = 8;
    std::uint64_t seed = 0;
};

namespace detail {

class HeuristicSearch {
public:
    HeuristicSearch(const Simulator& sim, const SolverLimits& lim) : sim_(sim), lim_(lim), t0_(Clock::now()) {}

    using Seqs = std::vector<std::vector<int>>;

    double route_value(int k, const std::vector<int>& seq) const {
        const auto r = build_route(sim_, k, seq);
        return r ? route_cost(sim_.instance(), sim_.vehicle(k), *r).total : kInf;
    }

    /// Best place to insert customer c into route k; returns (delta, new sequence).
    std::pair<double, std::vector<int>> best_insertion(int k, const std::vector<int>& seq, double base, int c) const {
        const Instance& inst = sim_.instance();
        const int p = inst.pickup_node(c), d = inst.delivery_node(c);
        std::pair<double, std::vector<int>> best{kInf, {}};
        const int len = static_cast<int>(seq.size());
        for (int i = 0; i <= len; ++i)
            for (int j = i; j <= len; ++j) {
                std::vector<int> trial;
                trial.reserve(seq.size() + 2);
                trial.insert(trial.end(), seq.begin(), seq.begin() + i);
                trial.push_back(p);
                trial.insert(trial.end(), seq.begin() + i, seq.begin() + j);
                trial.push_back(d);
                trial.insert(trial.end(), seq.begin() + j, seq.end());
                const double v = route_value(k, trial);
                if (v - base < best.first) best = {v - base, std::move(trial)};
            }
        return best;
    }

    std::optional<Seqs> construct(const std::vector<int>& order) const {
        const int K = sim_.n_vehicles();
        Seqs seqs(K);
        std::vector<double> values(K, 0.0);
        for (int c : order) {
            double best = kInf;
            int best_k = -1;
            std::vector<int> best_seq;
            for (int k = 0; k < K; ++k) {
                auto [delta, seq] = best_insertion(k, seqs[k], values[k], c);
                if (delta < best) {
                    best = delta;
                    best_k = k;
                    best_seq = std::move(seq);
                }
            }
            if (best_k < 0) return std::nullopt;
            seqs[best_k] = std::move(best_seq);
            values[best_k] = route_value(best_k, seqs[best_k]);
        }
        return seqs;
    }

    static std::vector<int> without(const std::vector<int>& seq, int p, int d) {
        std::vector<int> out;
        for (int v : seq)
            if (v != p && v != d) out.push_back(v);
        return out;
    }

    /// First-improvement descent over relocate, exchange and transfer moves.
    void improve(Seqs& seqs) const {
        const Instance& inst = sim_.instance();
        const int K = sim_.n_vehicles();
        std::vector<double> values(K);
        for (int k = 0; k < K; ++k) values[k] = route_value(k, seqs[k]);
        auto customers_of = [&](int k) {
            std::vector<int> cs;
            for (int v : seqs[k])
                if (inst.is_pickup(v)) cs.push_back(v);
            return cs;
        };
        constexpr double eps = 1e-9;
        bool improved = true;
        while (improved && !out_of_time()) {
            improved = false;
            // intra-route relocate
            for (int k = 0; k < K && !improved; ++k)
                for (int c : customers_of(k)) {
                    const auto rest = without(seqs[k], c, inst.delivery_node(c));
                    auto [delta, seq] = best_insertion(k, rest, 0.0, c);
                    if (delta < values[k] - eps) {
                        seqs[k] = std::move(seq);
                        values[k] = delta;
                        improved = true;
                        break;
                    }
                }
            // inter-route pair exchange
            for (int k1 = 0; k1 < K && !improved; ++k1)
                for (int k2 = k1 + 1; k2 < K && !improved; ++k2)
                    for (int c1 : customers_of(k1)) {
                        for (int c2 : customers_of(k2)) {
                            const auto r1 = without(seqs[k1], c1, inst.delivery_node(c1));
                            const auto r2 = without(seqs[k2], c2, inst.delivery_node(c2));
                            auto [v1, s1] = best_insertion(k1, r1, 0.0, c2);
                            if (v1 == kInf) continue;
                            auto [v2, s2] = best_insertion(k2, r2, 0.0, c1);
                            if (v1 + v2 < values[k1] + values[k2] - eps) {
                                seqs[k1] = std::move(s1);
                                seqs[k2] = std::move(s2);
                                values[k1] = v1;
                                values[k2] = v2;
                                improved = true;
                                break;
                            }
                        }
                        if (improved) break;
                    }
            // transfer to another vehicle, other-mode vehicles first
            for (int k1 = 0; k1 < K && !improved; ++k1) {
                std::vector<int> targets;
                for (int k2 = 0; k2 < K; ++k2)
                    if (k2 != k1 && sim_.vehicle(k2).mode != sim_.vehicle(k1).mode) targets.push_back(k2);
                for (int k2 = 0; k2 < K; ++k2)
                    if (k2 != k1 && sim_.vehicle(k2).mode == sim_.vehicle(k1).mode) targets.push_back(k2);
                for (int c : customers_of(k1)) {
                    const auto rest = without(seqs[k1], c, inst.delivery_node(c));
                    const double v_rest = route_value(k1, rest);
                    if (v_rest == kInf) continue;
                    for (int k2 : targets) {
                        auto [delta, seq] = best_insertion(k2, seqs[k2], values[k2], c);
                        if (v_rest + values[k2] + delta < values[k1] + values[k2] - eps) {
                            seqs[k1] = rest;
                            seqs[k2] = std::move(seq);
                            values[k1] = v_rest;
                            values[k2] += delta;
                            improved = true;
                            break;
                        }
                    }
                    if (improved) break;
                }
            }
        }
    }

    double total(const Seqs& seqs) const {
        double t = 0.0;
        for (int k = 0; k < sim_.n_vehicles(); ++k) t += route_value(k, seqs[k]);
        return t;
    }

    bool out_of_time() const { return seconds_since(t0_) > lim_.time_budget_s; }
    double elapsed() const { return seconds_since(t0_); }

private:
    const Simulator& sim_;
    SolverLimits lim_;
    Clock::time_point t0_;
};

}  // namespace detail

/// Cheapest insertion of pickup-delivery pairs followed by local search, restarted over seeded
/// customer orderings. The first ordering sorts customers by window opening; the second puts
/// customers that few vehicles can serve on their own first.
inline SolveReport solve_heuristic(const Simulator& sim, const SolverLimits& lim = {}, const HeuristicOptions& opt = {}) {
    detail::HeuristicSearch hs(sim, lim);
    const Instance& inst = sim.instance();
    std::vector<int> by_window(inst.n_customers());
    std::iota(by_window.begin(), by_window.end(), 0);
    std::stable_sort(by_window.begin(), by_window.end(),
                     [&](int a, int b) { return inst.customers[a].early < inst.customers[b].early; });
    std::vector<int> servers(inst.n_customers(), 0);
    for (int c = 0; c < inst.n_customers(); ++c)
        for (int k = 0; k < sim.n_vehicles(); ++k)
            servers[c] += build_route(sim, k, {inst.pickup_node(c), inst.delivery_node(c)}).has_value();
    std::vector<int> constrained = by_window;
    std::stable_sort(constrained.begin(), constrained.end(), [&](int a, int b) { return servers[a] < servers[b]; });
    std::vector<int> order = by_window;
    std::mt19937_64 rng(opt.seed);
    SolveReport rep;
    double best = kInf;
    detail::HeuristicSearch::Seqs best_seqs;
    const int rounds = std::max(opt.restarts, 1) + (constrained != by_window);
    for (int r = 0; r < rounds; ++r) {
        if (r > 0) {
            if (hs.out_of_time()) break;
            if (r == 1 && constrained != by_window) order = constrained;
            else std::shuffle(order.begin(), order.end(), rng);
        }
        auto seqs = hs.construct(order);
        if (!seqs) continue;
        hs.improve(*seqs);
        const double v = hs.total(*seqs);
        if (v < best - 1e-12) {
            best = v;
            best_seqs = *seqs;
        }
    }
    rep.seconds = hs.elapsed();
    if (best == kInf) {
        rep.status = "infeasible";
        rep.lower_bound = kInf;
        return rep;
    }
    std::vector<std::vector<Visit>> routes;
    for (int k = 0; k < sim.n_vehicles(); ++k) routes.push_back(*build_route(sim, k, best_seqs[k]));
    rep.solution = detail::assemble(sim, std::move(routes));
    rep.feasible = true;
    rep.status = "feasible";
    return rep;
}

// ---------------------------------------------------------------------------
// Exact

namespace detail {

class BranchAndBound {
public:
    BranchAndBound(const Simulator& sim, const SolverLimits& lim) : sim_(sim), inst_(sim.instance()), lim_(lim) {
        const int K = sim.n_vehicles(), N = inst_.n_customers();
        // cheapest weighted incoming leg into each customer node, per vehicle
        std::vector<std::vector<double>> in_p(K, std::vector<double>(N, kInf)), in_d = in_p;
        for (int k = 0; k < K; ++k) {
            const double w = mode_weight(inst_, sim.vehicle(k).mode);
            for (int c = 0; c < N; ++c)
                for (int u = 0; u < inst_.n_nodes(); ++u) {
                    const int p = inst_.pickup_node(c), d = inst_.delivery_node(c);
                    if (u != p && u != d) in_p[k][c] = std::min(in_p[k][c], w * sim.travel_time(k, u, p));
                    if (u != d) in_d[k][c] = std::min(in_d[k][c], w * sim.travel_time(k, u, d));
                }
        }
        in_d_ = in_d;
        // suffix minimum over vehicles k..K-1 of a full pickup-plus-delivery service
        pair_lb_.assign(K + 1, std::vector<double>(N, kInf));
        for (int k = K - 1; k >= 0; --k)
            for (int c = 0; c < N; ++c) pair_lb_[k][c] = std::min(pair_lb_[k + 1][c], in_p[k][c] + in_d[k][c]);
        for (int k = 0; k < K; ++k)
            same_as_prev_.push_back(k > 0 && sim.vehicle(k) == sim.vehicle(k - 1));
    }

    SolveReport run(const std::optional<Solution>& incumbent) {
        t0_ = Clock::now();
        const int K = sim_.n_vehicles();
        picked_.assign(inst_.n_customers(), 0);
        routes_.assign(K, {});
        first_pickup_.assign(K, std::numeric_limits<int>::max());
        if (incumbent) {
            best_ = incumbent->cost.total;
            best_routes_ = incumbent->routes;
        }
        root_lb_ = remaining_lb(0, initial_vehicle_state(sim_, 0));
        if (root_lb_ < kInf) dfs(0, initial_vehicle_state(sim_, 0), 0.0, 0.0);

        SolveReport rep;
        rep.nodes = nodes_;
        rep.seconds = seconds_since(t0_);
        if (best_ == kInf) {
            rep.status = aborted_ ? "limit" : "infeasible";
            rep.lower_bound = aborted_ ? root_lb_ : kInf;
            return rep;
        }
        rep.solution = assemble(sim_, best_routes_);
        rep.feasible = true;
        rep.proven_optimal = !aborted_;
        rep.lower_bound = aborted_ ? root_lb_ : rep.solution.cost.total;
        rep.status = aborted_ ? "limit" : "optimal";
        return rep;
    }

private:
    double remaining_lb(int k, const VehicleState& vs) const {
        double lb = 0.0;
        for (int c = 0; c < inst_.n_customers(); ++c)
            if (!picked_[c]) lb += pair_lb_[k][c];
        for (int c : vs.onboard) lb += in_d_[k][c];
        return lb;
    }

    bool limits_hit() {
        if (aborted_) return true;
        if (nodes_ >= lim_.max_nodes || ((nodes_ & 1023) == 0 && seconds_since(t0_) > lim_.time_budget_s))
            aborted_ = true;
        if (best_ < kInf && lim_.gap_target > 0 && (best_ - root_lb_) <= lim_.gap_target * std::abs(best_))
            aborted_ = true;
        return aborted_;
    }

    // committed: exact cost of closed routes; partial: admissible cost of the open route so far
    void dfs(int k, const VehicleState& vs, double committed, double partial) {
        ++nodes_;
        if (limits_hit()) return;
        const int K = sim_.n_vehicles();
        auto& route = routes_[k];
        const bool at_depot = inst_.is_depot(vs.position);
        const bool empty = route.empty();

        // close this vehicle's route where it stands
        if (at_depot && vs.onboard.empty()) {
            const double rc = route_cost(inst_, sim_.vehicle(k), route).total;
            const double c = committed + rc;
            if (k + 1 == K) {
                const bool all = std::all_of(picked_.begin(), picked_.end(), [](auto p) { return p != 0; });
                if (all && c < best_ - 1e-12) {
                    best_ = c;
                    best_routes_ = routes_;
                }
            } else {
                const VehicleState next = initial_vehicle_state(sim_, k + 1);
                if (c + remaining_lb(k + 1, next) < best_ - 1e-12) dfs(k + 1, next, c, 0.0);
            }
        }

        struct Child {
            int node;
            double cost;
        };
        std::vector<Child> children;
        const double w = mode_weight(inst_, sim_.vehicle(k).mode);
        auto leg_cost = [&](int node) {
            const double arrival = vs.clock + sim_.travel_time(k, vs.position, node);
            if (inst_.is_depot(node)) return inst_.rules.charge_final_return ? w * (arrival - vs.clock) : 0.0;
            double c = w * (arrival - vs.clock);
            if (inst_.is_pickup(node))
                c += inst_.cost_weights.alpha3_early * std::max(inst_.node_early(node) - arrival, 0.0);
            else
                c += inst_.cost_weights.alpha3_late * std::max(arrival - inst_.node_late(node), 0.0);
            return c;
        };
        for (int c = 0; c < inst_.n_customers(); ++c) {
            if (picked_[c]) continue;
            if (empty && same_as_prev_[k] && c <= first_pickup_[k - 1]) continue;
            const int p = inst_.pickup_node(c);
            if (hard_step_ok(sim_, k, vs, p)) children.push_back({p, leg_cost(p)});
        }
        for (int c : vs.onboard) {
            const int d = inst_.delivery_node(c);
            if (hard_step_ok(sim_, k, vs, d)) children.push_back({d, leg_cost(d)});
        }
        if (!empty && !at_depot)
            for (std::size_t di = 0; di < inst_.depots.size(); ++di) {
                const int dn = inst_.depot_node(static_cast<int>(di));
                if (hard_step_ok(sim_, k, vs, dn)) children.push_back({dn, leg_cost(dn)});
            }
        std::stable_sort(children.begin(), children.end(), [](const Child& a, const Child& b) { return a.cost < b.cost; });

        for (const Child& ch : children) {
            VehicleState next = vs;
            const Visit v = sim_.advance(k, next, ch.node);
            const bool is_pick = inst_.is_pickup(ch.node);
            const int c = inst_.customer_of(ch.node);
            if (is_pick) picked_[c] = 1;
            const bool set_first = is_pick && empty;
            if (set_first) first_pickup_[k] = c;
            const double np = partial + ch.cost;
            if (committed + np + remaining_lb(k, next) < best_ - 1e-12) {
                route.push_back(v);
                dfs(k, next, committed, np);
                route.pop_back();
            }
            if (set_first) first_pickup_[k] = std::numeric_limits<int>::max();
            if (is_pick) picked_[c] = 0;
            if (aborted_) return;
        }
    }

    const Simulator& sim_;
    const Instance& inst_;
    SolverLimits lim_;
    std::vector<std::vector<double>> pair_lb_, in_d_;
    std::vector<bool> same_as_prev_;
    Clock::time_point t0_;
    long nodes_ = 0;
    bool aborted_ = false;
    double root_lb_ = 0.0;
    double best_ = kInf;
    std::vector<std::vector<Visit>> best_routes_;
    std::vector<std::uint8_t> picked_;
    std::vector<std::vector<Visit>> routes_;
    std::vector<int> first_pickup_;
};

}  // namespace detail

/// Depth-first branch and bound over vehicles in index order. Each vehicle's route is grown one
/// node at a time (pickups, on-board deliveries, a recharge stop) and closed at a depot. The
/// bound adds, for every open customer, the cheapest weighted incoming legs into its pickup and
/// delivery. The heuristic supplies the first incumbent.
inline SolveReport solve_exact(const Simulator& sim, const SolverLimits& lim = {}, bool warm_start = true) {
    std::optional<Solution> incumbent;
    if (warm_start) {
        SolverLimits hl = lim;
        hl.time_budget_s = std::min(lim.time_budget_s, 10.0);
        auto h = solve_heuristic(sim, hl, {.restarts = 4, .seed = 0});
        if (h.feasible) incumbent = h.solution;
    }
    detail::BranchAndBound bnb(sim, lim);
    return bnb.run(incumbent);
}

inline SolveReport solve(const Simulator& sim, SolverKind kind, const SolverLimits& lim = {},
                         const HeuristicOptions& opt = {}) {
    if (kind == SolverKind::Auto) kind = 2 * sim.instance().n_customers() <= 10 ? SolverKind::Exact : SolverKind::Heuristic;
    return kind == SolverKind::Exact ? solve_exact(sim, lim) : solve_heuristic(sim, lim, opt);
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::string constraint;
    int vehicle = -1;
    int position = -1;
    std::string message;
};

/// Checks a solution against the hard constraints by re-simulating each route from its start
/// depot. Returns every violation found; an empty list means the solution is feasible.
inline std::vector<Violation> validate(const Solution& sol, const Simulator& sim) {
    std::vector<Violation> out;
    const Instance& inst = sim.instance();
    const int N = inst.n_customers();
    auto add = [&](std::string c, int k, int pos, std::string msg) { out.push_back({std::move(c), k, pos, std::move(msg)}); };
    if (static_cast<int>(sol.routes.size()) != sim.n_vehicles()) {
        add("fleet", -1, -1, "solution has " + std::to_string(sol.routes.size()) + " routes for " +
                                 std::to_string(sim.n_vehicles()) + " vehicles");
        return out;
    }
    std::vector<int> pick_count(N, 0), drop_count(N, 0), pick_vehicle(N, -1), drop_vehicle(N, -1);
    std::vector<double> pick_departure(N, kInf), drop_arrival(N, kInf);
    constexpr double tol = 1e-6;
    for (int k = 0; k < sim.n_vehicles(); ++k) {
        const VehicleSpec& spec = sim.vehicle(k);
        const auto& route = sol.routes[k];
        if (route.empty()) continue;
        if (!inst.is_depot(route.back().node)) add("route-end", k, static_cast<int>(route.size()) - 1, "route does not end at a depot");
        VehicleState vs = initial_vehicle_state(sim, k);
        for (int pos = 0; pos < static_cast<int>(route.size()); ++pos) {
            const int node = route[pos].node;
            if (node < 0 || node >= inst.n_nodes()) {
                add("node", k, pos, "node index out of range");
                break;
            }
            if (sim.travel_time(k, vs.position, node) == kInf) {
                add("reachability", k, pos, "no path from node " + std::to_string(vs.position));
                break;
            }
            const Visit v = sim.advance(k, vs, node);
            const Visit& rec = route[pos];
            if (std::abs(v.arrival - rec.arrival) > tol || std::abs(v.departure - rec.departure) > tol ||
                std::abs(v.battery_after - rec.battery_after) > tol || std::abs(v.load_after - rec.load_after) > tol)
                add("consistency", k, pos, "recorded times, battery or load differ from the dynamics");
            if (v.battery_arrival < spec.battery_floor * spec.battery - tol)
                add("battery-floor", k, pos, "battery " + std::to_string(v.battery_arrival) + " kJ below floor");
            if (v.load_after < -tol || v.load_after > spec.capacity + tol)
                add("capacity", k, pos, "load " + std::to_string(v.load_after) + " outside [0, capacity]");
            if (inst.is_depot(node)) continue;
            const int c = inst.customer_of(node);
            if (inst.is_pickup(node)) {
                ++pick_count[c];
                pick_vehicle[c] = k;
                pick_departure[c] = v.departure;
                if (inst.rules.wait_for_pickup && v.start < inst.node_early(node) - tol)
                    add("pickup-window", k, pos, "service starts before the window opens");
                if (v.start > inst.node_late(node) + tol) add("pickup-window", k, pos, "service starts after the window closes");
            } else {
                ++drop_count[c];
                drop_vehicle[c] = k;
                drop_arrival[c] = v.arrival;
                if (pick_vehicle[c] != k || pick_count[c] == 0)
                    add("precedence", k, pos, "delivery of customer " + std::to_string(c) + " before its pickup");
            }
        }
        if (std::abs(vs.load) > tol) add("capacity", k, static_cast<int>(route.size()) - 1, "vehicle ends loaded");
    }
    for (int c = 0; c < N; ++c) {
        if (pick_count[c] != 1 || drop_count[c] != 1)
            add("served-once", -1, -1, "customer " + std::to_string(c) + " picked " + std::to_string(pick_count[c]) +
                                           "x, delivered " + std::to_string(drop_count[c]) + "x");
        else if (pick_vehicle[c] != drop_vehicle[c])
            add("same-vehicle", -1, -1, "customer " + std::to_string(c) + " picked and delivered by different vehicles");
        else if (drop_arrival[c] < pick_departure[c] - tol)
            add("precedence", pick_vehicle[c], -1, "customer " + std::to_string(c) + " delivered before pickup departure");
    }
    return out;
}

inline nlohmann::json to_json(const Violation& v) {
    return {{"constraint", v.constraint}, {"vehicle", v.vehicle}, {"position", v.position}, {"message", v.message}};
}

/// Relative gap (cost - baseline) / baseline.
inline double gap(double cost, double baseline) {
    if (!(baseline > 0)) throw ContractViolation("gap: baseline must be positive");
    return (cost - baseline) / baseline;
}

inline double mean_gap(const std::vector<double>& costs, const std::vector<double>& baselines) {
    if (costs.size() != baselines.size() || costs.empty())
        throw ContractViolation("mean_gap: need equally sized nonempty vectors");
    double s = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) s += gap(costs[i], baselines[i]);
    return s / static_cast<double>(costs.size());
}

inline nlohmann::json to_json(const SolveReport& r, const Instance& inst) {
    nlohmann::json j{{"status", r.status},
                     {"feasible", r.feasible},
                     {"proven_optimal", r.proven_optimal},
                     {"lower_bound", r.lower_bound == kInf ? nlohmann::json(nullptr) : nlohmann::json(r.lower_bound)},
                     {"nodes", r.nodes},
                     {"seconds", r.seconds}};
    if (r.feasible) j["solution"] = to_json(r.solution, inst);
    return j;
}

}  // namespace cpdptw
