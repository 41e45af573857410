#pragma once

// The routing MDP: vehicle/node state, the five masking rules, transition dynamics, cost
// accounting, and rollout of any scorer into a Solution.

#include <algorithm>
#include <bit>
#include <cstdio>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpdptw/common.hpp"
#include "cpdptw/energy.hpp"
#include "cpdptw/instance.hpp"
#include "cpdptw/network.hpp"

namespace cpdptw {

struct Visit {
    int node = 0;
    double arrival = 0.0;
    double start = 0.0;      // service start (after any wait)
    double departure = 0.0;  // after service, or after recharge at a depot
    double battery_arrival = 0.0;
    double battery_after = 0.0;
    double load_after = 0.0;
};

struct Action {
    int vehicle = 0;
    int node = 0;
    friend bool operator==(const Action&, const Action&) = default;
};

/// Weighted cost components; `uav_minutes`/`adr_minutes` are the unweighted travel totals.
struct CostBreakdown {
    double travel_uav = 0.0;
    double travel_adr = 0.0;
    double early_penalty = 0.0;
    double delay_penalty = 0.0;
    double battery_penalty = 0.0;
    double total = 0.0;
    double uav_minutes = 0.0;
    double adr_minutes = 0.0;

    CostBreakdown& operator+=(const CostBreakdown& o) {
        travel_uav += o.travel_uav;
        travel_adr += o.travel_adr;
        early_penalty += o.early_penalty;
        delay_penalty += o.delay_penalty;
        battery_penalty += o.battery_penalty;
        total += o.total;
        uav_minutes += o.uav_minutes;
        adr_minutes += o.adr_minutes;
        return *this;
    }
};

struct Solution {
    std::vector<int> start_depots;
    std::vector<std::vector<Visit>> routes;  // start depot is implicit, departure at time 0
    std::vector<Action> actions;             // global decision order
    CostBreakdown cost;
    bool complete = true;
};

struct VehicleState {
    int position = 0;
    double clock = 0.0;
    double load = 0.0;
    double battery = 0.0;
    double min_battery = 0.0;
    std::vector<int> onboard;  // customer ids
};

struct SimState {
    std::vector<VehicleState> vehicles;
    std::vector<double> remaining_demand;  // per customer node; zeroed once served
    std::vector<std::uint8_t> visited;     // per customer node
    int t = 0;
    std::vector<std::vector<Visit>> routes;
    std::vector<Action> actions;
};

class ActionMask {
public:
    ActionMask() = default;
    ActionMask(int n_vehicles, int n_nodes) : n_nodes_(n_nodes), bits_(static_cast<std::size_t>(n_vehicles) * n_nodes, 0) {}

    int n_vehicles() const { return n_nodes_ ? static_cast<int>(bits_.size()) / n_nodes_ : 0; }
    int n_nodes() const { return n_nodes_; }
    bool operator()(int k, int node) const { return bits_[static_cast<std::size_t>(k) * n_nodes_ + node] != 0; }
    void set(int k, int node, bool v) { bits_[static_cast<std::size_t>(k) * n_nodes_ + node] = v ? 1 : 0; }
    bool any() const { return std::any_of(bits_.begin(), bits_.end(), [](auto b) { return b != 0; }); }
    int count() const { return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1)); }

private:
    int n_nodes_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Immutable problem context plus per-vehicle travel tables and a thread-safe energy memo.
class Simulator {
public:
    Simulator(Instance inst, FleetSpec fleet, const DualNetwork& nets, PhysicsConfig phys = {},
              std::optional<AdjacencySpec> neighborhood = std::nullopt)
        : ctx_(std::make_shared<Context>()) {
        check_instance(inst);
        check_fleet(fleet, inst);
        check_params(phys.uav);
        check_params(phys.adr);
        check_wind(phys.wind);
        if (!(phys.depot_speed_factor > 0 && phys.depot_speed_factor <= 1))
            throw ContractViolation("depot_speed_factor must be in (0,1]");
        for (const ModeGraph* g : {&nets.uav, &nets.adr}) {
            if (g->n_nodes() < inst.n_nodes())
                throw ContractViolation("network has fewer nodes than the instance");
            for (int v = 0; v < inst.n_nodes(); ++v) {
                const NodeKind want = inst.is_pickup(v)     ? NodeKind::CustomerPickup
                                      : inst.is_delivery(v) ? NodeKind::CustomerDelivery
                                                            : NodeKind::Depot;
                if (g->nodes()[v].kind != want)
                    throw ContractViolation("network node " + std::to_string(v) + " kind does not match the instance");
            }
            if (g->n_nodes() > inst.n_nodes() && g->is_key(inst.n_nodes()))
                throw ContractViolation("network has key nodes not present in the instance");
        }
        Context& c = *ctx_;
        c.inst = std::move(inst);
        c.fleet = std::move(fleet);
        c.phys = phys;
        c.neighborhood = neighborhood;
        c.uav_table = TravelTable(nets.uav);
        c.adr_table = TravelTable(nets.adr);
        if (neighborhood) {
            c.nb_temporal = node_temporal_adjacency(c.inst, *neighborhood);
            c.nb_spatial = node_spatial_adjacency(c.inst, *neighborhood);
        }
        const int n = c.inst.n_nodes();
        c.time.resize(c.fleet.vehicles.size());
        for (int k = 0; k < c.fleet.size(); ++k) {
            c.time[k].assign(static_cast<std::size_t>(n) * n, kInf);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) c.time[k][static_cast<std::size_t>(i) * n + j] = path_time(k, i, j);
        }
    }

    /// Identity of the shared context; copies of a simulator share it.
    std::weak_ptr<const void> token() const { return ctx_; }

    const Instance& instance() const { return ctx_->inst; }
    const FleetSpec& fleet() const { return ctx_->fleet; }
    const PhysicsConfig& physics() const { return ctx_->phys; }
    const std::optional<AdjacencySpec>& neighborhood() const { return ctx_->neighborhood; }
    const TravelTable& table(Mode m) const { return m == Mode::UAV ? ctx_->uav_table : ctx_->adr_table; }
    const VehicleSpec& vehicle(int k) const { return ctx_->fleet.vehicles[k]; }
    int n_vehicles() const { return ctx_->fleet.size(); }
    int n_nodes() const { return ctx_->inst.n_nodes(); }

    /// Minutes for vehicle k from node i to node j; infinite when unreachable.
    double travel_time(int k, int i, int j) const {
        return ctx_->time[k][static_cast<std::size_t>(i) * n_nodes() + j];
    }

    double leg_speed(int k, int j) const {
        const double v = vehicle(k).max_speed;
        return instance().is_depot(j) ? v * physics().depot_speed_factor : v;
    }

    /// kJ for vehicle k from i to j carrying `load` units; summed over the path's edges.
    double leg_energy(int k, int i, int j, double load) const {
        if (i == j) return 0.0;
        const EnergyKey key{k, i, j, load};
        {
            std::lock_guard lock(ctx_->cache_mutex);
            if (auto it = ctx_->energy_cache.find(key); it != ctx_->energy_cache.end()) return it->second;
        }
        const VehicleSpec& v = vehicle(k);
        const TravelTable& tab = table(v.mode);
        const auto& path = tab.path(i, j);
        double kj = kInf;
        if (path) {
            kj = 0.0;
            const double speed = leg_speed(k, j);
            const double payload = load * physics().kg_per_unit;
            for (int ei : path->edges) {
                const Edge& e = tab.graph().edges()[ei];
                const Point a = tab.graph().nodes()[e.from].pos;
                const Point b = tab.graph().nodes()[e.to].pos;
                const double course = std::atan2(b.y - a.y, b.x - a.x);
                const auto edge_key = (static_cast<std::uint64_t>(e.from) << 32) | static_cast<std::uint32_t>(e.to);
                kj += cpdptw::leg_energy(v.mode, e.length_m, std::min(speed, e.speed_cap), payload,
                                         leg_wind(physics().wind, edge_key), course, physics());
            }
        }
        std::lock_guard lock(ctx_->cache_mutex);
        ctx_->energy_cache.emplace(key, kj);
        return kj;
    }

    SimState reset() const {
        SimState s;
        const int two_n = 2 * instance().n_customers();
        for (const auto& v : fleet().vehicles) {
            VehicleState vs;
            vs.position = v.start_depot;
            vs.battery = v.battery;
            vs.min_battery = v.battery;
            s.vehicles.push_back(vs);
        }
        s.remaining_demand.resize(two_n);
        for (int node = 0; node < two_n; ++node) s.remaining_demand[node] = std::abs(instance().node_demand(node));
        s.visited.assign(two_n, 0);
        s.routes.resize(fleet().vehicles.size());
        return s;
    }

    /// Applies the transition for vehicle k moving to `node`, without any feasibility checks.
    Visit advance(int k, VehicleState& vs, int node) const {
        const Instance& inst = instance();
        const VehicleSpec& spec = vehicle(k);
        const double travel = travel_time(k, vs.position, node);
        const double energy = leg_energy(k, vs.position, node, vs.load);
        Visit v;
        v.node = node;
        v.arrival = vs.clock + travel;
        vs.battery -= energy;
        v.battery_arrival = vs.battery;
        vs.min_battery = std::min(vs.min_battery, vs.battery);
        if (inst.is_depot(node)) {
            v.start = v.arrival;
            v.departure = v.arrival + std::max(spec.battery - vs.battery, 0.0) / spec.charge_rate;
            vs.battery = spec.battery;
        } else if (inst.is_pickup(node)) {
            const double e = inst.node_early(node);
            v.start = inst.rules.wait_for_pickup ? std::max(v.arrival, e) : v.arrival;
            v.departure = v.start + inst.service_time;
            vs.load += inst.node_demand(node);
            vs.onboard.push_back(node);
        } else {
            v.start = v.arrival;
            v.departure = v.start + inst.service_time;
            vs.load += inst.node_demand(node);
            const int c = inst.customer_of(node);
            std::erase(vs.onboard, c);
            if (std::abs(vs.load) < 1e-9) vs.load = 0.0;
        }
        vs.clock = v.departure;
        vs.position = node;
        v.battery_after = vs.battery;
        v.load_after = vs.load;
        return v;
    }

    /// Cheapest energy from `node` to any depot with `load` on board.
    double return_energy(int k, int node, double load) const {
        double best = kInf;
        for (std::size_t d = 0; d < instance().depots.size(); ++d)
            best = std::min(best, leg_energy(k, node, instance().depot_node(static_cast<int>(d)), load));
        return best;
    }

    bool all_served(const SimState& s) const {
        return std::all_of(s.visited.begin(), s.visited.end(), [](auto v) { return v != 0; });
    }

    bool vehicle_finished(const SimState& s, int k) const {
        return all_served(s) && instance().is_depot(s.vehicles[k].position);
    }

    bool terminal(const SimState& s) const {
        for (int k = 0; k < n_vehicles(); ++k)
            if (!vehicle_finished(s, k)) return false;
        return true;
    }

    /// Masking rules:
    ///  1. served customer nodes are closed;
    ///  2. a node is open only if the leg there plus the cheapest depot return fit in the battery;
    ///  3. pickups exceeding remaining capacity are closed;
    ///  4. with a neighbourhood spec, customer nodes outside the temporal/spatial neighbourhood of
    ///     the vehicle's current customer node are closed (on-board deliveries stay open);
    ///  5. deliveries are open only to the vehicle carrying that parcel.
    /// Pickups that would start after their window closes are also closed. Depots stay open for
    /// every vehicle that has not finished.
    ActionMask feasible_mask(const SimState& s) const {
        const Instance& inst = instance();
        const int n = inst.n_customers();
        ActionMask mask(n_vehicles(), n_nodes());
        for (int k = 0; k < n_vehicles(); ++k) {
            if (vehicle_finished(s, k)) continue;
            const VehicleState& vs = s.vehicles[k];
            const VehicleSpec& spec = vehicle(k);
            for (std::size_t d = 0; d < inst.depots.size(); ++d) {
                const int node = inst.depot_node(static_cast<int>(d));
                if (travel_time(k, vs.position, node) < kInf || node == vs.position) mask.set(k, node, true);
            }
            for (int node = 0; node < 2 * n; ++node) {
                if (s.visited[node]) continue;                                       // rule 1
                const int c = inst.customer_of(node);
                const bool onboard = std::find(vs.onboard.begin(), vs.onboard.end(), c) != vs.onboard.end();
                if (inst.is_delivery(node) && !onboard) continue;                   // rule 5
                if (inst.is_pickup(node) && vs.load + inst.node_demand(node) > spec.capacity + 1e-9) continue;  // rule 3
                const double travel = travel_time(k, vs.position, node);
                if (travel == kInf) continue;
                if (inst.is_pickup(node) && vs.clock + travel > inst.node_late(node)) continue;
                if (ctx_->neighborhood && !inst.is_depot(vs.position) && !(inst.is_delivery(node) && onboard)) {
                    const int p = vs.position;
                    if (!ctx_->nb_temporal[p][node] && !ctx_->nb_spatial[p][node]) continue;  // rule 4
                }
                const double load_after = vs.load + inst.node_demand(node);
                const double need = leg_energy(k, vs.position, node, vs.load) + return_energy(k, node, load_after);
                if (vs.battery - need < -1e-12) continue;                            // rule 2
                mask.set(k, node, true);
            }
        }
        return mask;
    }

    SimState step(const SimState& s, Action a) const {
        if (a.vehicle < 0 || a.vehicle >= n_vehicles() || a.node < 0 || a.node >= n_nodes())
            throw ContractViolation("step: action out of range");
        if (!feasible_mask(s)(a.vehicle, a.node))
            throw ContractViolation("step: action (" + std::to_string(a.vehicle) + ", " + std::to_string(a.node) +
                                    ") is masked");
        SimState next = s;
        apply(next, a);
        return next;
    }

    /// In-place transition; the caller is responsible for mask checks.
    void apply(SimState& s, Action a) const {
        const Visit v = advance(a.vehicle, s.vehicles[a.vehicle], a.node);
        if (!instance().is_depot(a.node)) {
            s.visited[a.node] = 1;
            s.remaining_demand[a.node] = 0.0;
        }
        s.routes[a.vehicle].push_back(v);
        s.actions.push_back(a);
        ++s.t;
    }

private:
    struct EnergyKey {
        int k, i, j;
        double load;
        friend bool operator==(const EnergyKey&, const EnergyKey&) = default;
    };
    struct EnergyKeyHash {
        std::size_t operator()(const EnergyKey& key) const {
            std::uint64_t h = detail::hash_combine(static_cast<std::uint64_t>(key.k), static_cast<std::uint64_t>(key.i));
            h = detail::hash_combine(h, static_cast<std::uint64_t>(key.j));
            return detail::hash_combine(h, std::bit_cast<std::uint64_t>(key.load));
        }
    };
    struct Context {
        Instance inst;
        FleetSpec fleet;
        PhysicsConfig phys;
        std::optional<AdjacencySpec> neighborhood;
        TravelTable uav_table, adr_table;
        BoolMatrix nb_temporal, nb_spatial;
        std::vector<std::vector<double>> time;
        std::mutex cache_mutex;
        std::unordered_map<EnergyKey, double, EnergyKeyHash> energy_cache;
    };

    double path_time(int k, int i, int j) const {
        if (i == j) return 0.0;
        const Context& c = *ctx_;
        const VehicleSpec& v = c.fleet.vehicles[k];
        const TravelTable& tab = v.mode == Mode::UAV ? c.uav_table : c.adr_table;
        const auto& path = tab.path(i, j);
        if (!path) return kInf;
        const double speed = c.inst.is_depot(j) ? v.max_speed * c.phys.depot_speed_factor : v.max_speed;
        double seconds = 0.0;
        for (int ei : path->edges) {
            const Edge& e = tab.graph().edges()[ei];
            seconds += e.length_m / std::min(speed, e.speed_cap);
        }
        return seconds / 60.0;
    }

    std::shared_ptr<Context> ctx_;
};

// ---------------------------------------------------------------------------
// Cost accounting

/// Cost of one vehicle's route. Travel is charged per leg as arrival minus previous departure;
/// the final return leg is skipped when the instance says so. Early arrival is penalised at
/// pickups only, delay at deliveries only, and a vehicle whose battery ever fell below its floor
/// pays lambda once.
inline CostBreakdown route_cost(const Instance& inst, const VehicleSpec& spec, const std::vector<Visit>& route) {
    CostBreakdown c;
    double prev_departure = 0.0;
    double minutes = 0.0;
    bool below_floor = false;
    const auto& w = inst.cost_weights;
    for (std::size_t idx = 0; idx < route.size(); ++idx) {
        const Visit& v = route[idx];
        const bool final_return = idx + 1 == route.size() && inst.is_depot(v.node);
        if (!(final_return && !inst.rules.charge_final_return)) minutes += v.arrival - prev_departure;
        prev_departure = v.departure;
        if (inst.is_pickup(v.node))
            c.early_penalty += w.alpha3_early * std::max(inst.node_early(v.node) - v.arrival, 0.0);
        else if (inst.is_delivery(v.node))
            c.delay_penalty += w.alpha3_late * std::max(v.arrival - inst.node_late(v.node), 0.0);
        if (v.battery_arrival < spec.battery_floor * spec.battery - 1e-12) below_floor = true;
    }
    if (spec.mode == Mode::UAV) {
        c.uav_minutes = minutes;
        c.travel_uav = w.alpha1 * minutes;
    } else {
        c.adr_minutes = minutes;
        c.travel_adr = w.alpha2 * minutes;
    }
    if (below_floor) c.battery_penalty = w.lambda_battery;
    c.total = c.travel_uav + c.travel_adr + c.early_penalty + c.delay_penalty + c.battery_penalty;
    return c;
}

inline CostBreakdown episode_cost(const Solution& sol, const Instance& inst, const FleetSpec& fleet) {
    CostBreakdown total;
    for (std::size_t k = 0; k < sol.routes.size(); ++k) total += route_cost(inst, fleet.vehicles[k], sol.routes[k]);
    // recompute the total from the parts so decomposition is exact by construction
    total.total = total.travel_uav + total.travel_adr + total.early_penalty + total.delay_penalty + total.battery_penalty;
    return total;
}

inline Solution solution_from_state(const Simulator& sim, const SimState& s, bool complete) {
    Solution sol;
    for (const auto& v : sim.fleet().vehicles) sol.start_depots.push_back(v.start_depot);
    sol.routes = s.routes;
    sol.actions = s.actions;
    sol.complete = complete;
    sol.cost = episode_cost(sol, sim.instance(), sim.fleet());
    return sol;
}

// ---------------------------------------------------------------------------
// Rollout

enum class Strategy { Paired, UavPrior, AdrPrior };

inline Strategy strategy_from_string(std::string_view s) {
    if (s == "paired") return Strategy::Paired;
    if (s == "uav-prior") return Strategy::UavPrior;
    if (s == "adr-prior") return Strategy::AdrPrior;
    throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

/// Row-major (vehicle, node) scores; only unmasked entries are read.
using ScoreMatrix = std::vector<std::vector<double>>;
using Scorer = std::function<ScoreMatrix(const Simulator&, const SimState&, const ActionMask&)>;

/// Greedy-nearest: prefer the customer node with the earliest service start. A vehicle with no
/// open customer node heads for the depot that it reaches first; one already parked at a depot
/// scores lowest.
inline ScoreMatrix greedy_scores(const Simulator& sim, const SimState& s, const ActionMask& mask) {
    const Instance& inst = sim.instance();
    ScoreMatrix scores(sim.n_vehicles(), std::vector<double>(sim.n_nodes(), -kInf));
    for (int k = 0; k < sim.n_vehicles(); ++k) {
        const VehicleState& vs = s.vehicles[k];
        bool has_customer = false;
        for (int node = 0; node < 2 * inst.n_customers(); ++node) {
            if (!mask(k, node)) continue;
            has_customer = true;
            const double arrival = vs.clock + sim.travel_time(k, vs.position, node);
            const double start = inst.is_pickup(node) && inst.rules.wait_for_pickup
                                     ? std::max(arrival, inst.node_early(node))
                                     : arrival;
            scores[k][node] = -start;
        }
        for (std::size_t d = 0; d < inst.depots.size(); ++d) {
            const int node = inst.depot_node(static_cast<int>(d));
            if (!mask(k, node)) continue;
            if (has_customer)
                scores[k][node] = -1e9;
            else if (inst.is_depot(vs.position))
                scores[k][node] = -1e12;
            else
                scores[k][node] = -(vs.clock + sim.travel_time(k, vs.position, node));
        }
    }
    return scores;
}

inline Scorer greedy_scorer() { return greedy_scores; }

struct RolloutOptions {
    Strategy strategy = Strategy::Paired;
    std::uint64_t seed = 0;
    int step_limit = 0;  // 0 selects 10 * 2N
};

/// Picks the highest-scoring open pair. Priority strategies restrict the choice to the preferred
/// mode's open customer pairs whenever there is one. Ties go to the lowest (vehicle, node).
inline Action select_action(const Simulator& sim, const ActionMask& mask, const ScoreMatrix& scores, Strategy strategy) {
    const Instance& inst = sim.instance();
    auto pick = [&](auto&& eligible) -> std::optional<Action> {
        std::optional<Action> best;
        double best_score = -kInf;
        for (int k = 0; k < mask.n_vehicles(); ++k)
            for (int node = 0; node < mask.n_nodes(); ++node) {
                if (!mask(k, node) || !eligible(k, node)) continue;
                const double sc = scores[k][node];
                if (!best || sc > best_score) {
                    best = Action{k, node};
                    best_score = sc;
                }
            }
        return best;
    };
    if (strategy != Strategy::Paired) {
        const Mode preferred = strategy == Strategy::UavPrior ? Mode::UAV : Mode::ADR;
        if (auto a = pick([&](int k, int node) { return sim.vehicle(k).mode == preferred && !inst.is_depot(node); }))
            return *a;
    }
    if (auto a = pick([](int, int) { return true; })) return *a;
    throw ContractViolation("select_action: every pair is masked");
}

inline Solution rollout(const Simulator& sim, const Scorer& scorer, const RolloutOptions& opt = {}) {
    const int limit = opt.step_limit > 0 ? opt.step_limit : 10 * 2 * sim.instance().n_customers();
    SimState s = sim.reset();
    while (!sim.terminal(s)) {
        if (s.t >= limit) return solution_from_state(sim, s, false);
        const ActionMask mask = sim.feasible_mask(s);
        if (!mask.any()) return solution_from_state(sim, s, false);
        const ScoreMatrix scores = scorer(sim, s, mask);
        sim.apply(s, select_action(sim, mask, scores, opt.strategy));
    }
    return solution_from_state(sim, s, true);
}

/// Re-executes a solution's actions from reset; returns the indices of actions that were masked
/// when taken.
inline std::vector<int> replay_violations(const Simulator& sim, const Solution& sol) {
    std::vector<int> bad;
    SimState s = sim.reset();
    for (std::size_t i = 0; i < sol.actions.size(); ++i) {
        if (!sim.feasible_mask(s)(sol.actions[i].vehicle, sol.actions[i].node)) bad.push_back(static_cast<int>(i));
        sim.apply(s, sol.actions[i]);
    }
    return bad;
}

// ---------------------------------------------------------------------------
// Solution output

inline std::string_view node_kind_label(const Instance& inst, int node) {
    if (inst.is_pickup(node)) return "pickup";
    if (inst.is_delivery(node)) return "delivery";
    return "depot";
}

/// CSV, one row per visit: vehicle,node,kind,arrival,departure,battery,load
inline void write_solution_csv(std::ostream& out, const Solution& sol, const Instance& inst) {
    out << "vehicle,node,kind,arrival,departure,battery,load\n";
    char buf[256];
    for (std::size_t k = 0; k < sol.routes.size(); ++k)
        for (const Visit& v : sol.routes[k]) {
            std::snprintf(buf, sizeof buf, "%zu,%d,%s,%.6f,%.6f,%.6f,%.6f\n", k, v.node,
                          std::string(node_kind_label(inst, v.node)).c_str(), v.arrival, v.departure, v.battery_after,
                          v.load_after);
            out << buf;
        }
}

inline nlohmann::json to_json(const CostBreakdown& c) {
    return {{"travel_uav", c.travel_uav},       {"travel_adr", c.travel_adr},
            {"early_penalty", c.early_penalty}, {"delay_penalty", c.delay_penalty},
            {"battery_penalty", c.battery_penalty}, {"total", c.total},
            {"uav_minutes", c.uav_minutes},     {"adr_minutes", c.adr_minutes}};
}

inline nlohmann::json to_json(const Solution& sol, const Instance& inst) {
    nlohmann::json routes = nlohmann::json::array();
    for (std::size_t k = 0; k < sol.routes.size(); ++k) {
        nlohmann::json visits = nlohmann::json::array();
        for (const Visit& v : sol.routes[k])
            visits.push_back({{"node", v.node},
                              {"kind", std::string(node_kind_label(inst, v.node))},
                              {"arrival", v.arrival},
                              {"start", v.start},
                              {"departure", v.departure},
                              {"battery_arrival", v.battery_arrival},
                              {"battery", v.battery_after},
                              {"load", v.load_after}});
        routes.push_back({{"vehicle", k}, {"start_depot", sol.start_depots.at(k)}, {"visits", visits}});
    }
    return {{"format_version", 1}, {"complete", sol.complete}, {"cost", to_json(sol.cost)}, {"routes", routes}};
}

}  // namespace cpdptw
