#pragma once

// Problem instances and fleet specifications: types, seeded generation, and
// the JSON instance file format (format_version 1).
//
// Node numbering used throughout the library, for N customers and C depots:
//   pickups    0 .. N-1
//   deliveries N .. 2N-1   (delivery of customer i is node i + N)
//   depots     2N .. 2N+C-1

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cpdptw/common.hpp"
#include "cpdptw/json_util.hpp"

namespace cpdptw {

struct Customer {
    int id = 0;  // pickup node index
    Point pickup_loc;
    Point delivery_loc;
    double early = 0.0;  // min; pickup may not start before this
    double late = 0.0;   // min; delivery due; pickup must start by this
    double demand = 0.0; // load units, positive at the pickup
};

struct Depot {
    int id = 0;  // node index
    Point loc;
    bool recharge = true;
};

struct CostWeights {
    double alpha1 = 0.6;         // per UAV travel minute
    double alpha2 = 0.1;         // per ADR travel minute
    double alpha3_early = 0.01;  // per minute arrived before a pickup window opens
    double alpha3_late = 0.05;   // per minute of delivery delay
    double lambda_battery = 1.0; // per vehicle dipping below its battery floor
};

/// Switches that distinguish the general model from the simplified hand-worked setting
/// where vehicles never wait and the final return leg is not charged.
struct ServiceRules {
    bool wait_for_pickup = true;
    bool charge_final_return = true;
};

struct Instance {
    double area_km = 5.0;
    std::vector<Customer> customers;
    std::vector<Depot> depots;
    double service_time = 2.0;  // min
    CostWeights cost_weights;
    ServiceRules rules;
    std::uint64_t seed = 0;

    int n_customers() const { return static_cast<int>(customers.size()); }
    int n_nodes() const { return 2 * n_customers() + static_cast<int>(depots.size()); }
    int pickup_node(int c) const { return c; }
    int delivery_node(int c) const { return c + n_customers(); }
    int depot_node(int d) const { return 2 * n_customers() + d; }

    bool is_pickup(int node) const { return node >= 0 && node < n_customers(); }
    bool is_delivery(int node) const { return node >= n_customers() && node < 2 * n_customers(); }
    bool is_depot(int node) const { return node >= 2 * n_customers() && node < n_nodes(); }
    int customer_of(int node) const { return is_pickup(node) ? node : node - n_customers(); }

    Point location(int node) const {
        if (is_pickup(node)) return customers[node].pickup_loc;
        if (is_delivery(node)) return customers[node - n_customers()].delivery_loc;
        return depots.at(node - 2 * n_customers()).loc;
    }
    /// Signed demand q_i: positive at pickups, negative at deliveries, zero at depots.
    double node_demand(int node) const {
        if (is_pickup(node)) return customers[node].demand;
        if (is_delivery(node)) return -customers[node - n_customers()].demand;
        return 0.0;
    }
    double node_early(int node) const { return is_depot(node) ? 0.0 : customers[customer_of(node)].early; }
    double node_late(int node) const { return is_depot(node) ? kInf : customers[customer_of(node)].late; }
};

struct VehicleSpec {
    Mode mode = Mode::UAV;
    double max_speed = 20.0;     // m/s
    double capacity = 5.0;       // load units
    double battery = 6.5;        // kJ
    double charge_rate = 0.65;   // kJ/min
    double battery_floor = 0.3;  // fraction of battery
    int start_depot = 0;         // node index

    friend bool operator==(const VehicleSpec&, const VehicleSpec&) = default;
};

struct FleetSpec {
    std::vector<VehicleSpec> vehicles;

    int size() const { return static_cast<int>(vehicles.size()); }
};

/// Default UAV from the experimental setup: 20 m/s, capacity 5, 6.5 kJ, 30% floor, 10-min full recharge.
inline VehicleSpec default_uav(int start_depot) { return {Mode::UAV, 20.0, 5.0, 6.5, 0.65, 0.3, start_depot}; }

/// Default ADR: 8.3 m/s, capacity 10, 4.5 kJ, 20% floor, 20-min full recharge.
inline VehicleSpec default_adr(int start_depot) { return {Mode::ADR, 8.3, 10.0, 4.5, 0.225, 0.2, start_depot}; }

/// n_uav UAVs then n_adr ADRs, spread round-robin over the instance depots.
inline FleetSpec make_fleet(const Instance& inst, int n_uav, int n_adr) {
    FleetSpec f;
    const int nd = static_cast<int>(inst.depots.size());
    for (int k = 0; k < n_uav; ++k) f.vehicles.push_back(default_uav(inst.depot_node(k % nd)));
    for (int k = 0; k < n_adr; ++k) f.vehicles.push_back(default_adr(inst.depot_node(k % nd)));
    return f;
}

inline void check_instance(const Instance& inst) {
    if (inst.depots.empty()) throw ParseError("depots", "at least one depot required");
    if (!(inst.area_km > 0)) throw ParseError("area_km", "must be positive");
    if (inst.service_time < 0) throw ParseError("service_time", "must be nonnegative");
    const auto& w = inst.cost_weights;
    if (w.alpha1 < 0 || w.alpha2 < 0 || w.alpha3_early < 0 || w.alpha3_late < 0 || w.lambda_battery < 0)
        throw ParseError("cost_weights", "weights must be nonnegative");
    auto inside = [&](Point p) {
        return p.x >= 0 && p.y >= 0 && p.x <= inst.area_km && p.y <= inst.area_km;
    };
    const int n = inst.n_customers();
    for (int i = 0; i < n; ++i) {
        const auto& c = inst.customers[i];
        const std::string at = "customers[" + std::to_string(i) + "]";
        if (c.id != i) throw ParseError(at + ".id", "customer ids must be 0..N-1 in order");
        if (!(c.early < c.late)) throw ParseError(at + ".early", "early must be < late");
        if (!(c.demand > 0)) throw ParseError(at + ".demand", "must be positive");
        if (!inside(c.pickup_loc)) throw ParseError(at + ".pickup_loc", "outside area");
        if (!inside(c.delivery_loc)) throw ParseError(at + ".delivery_loc", "outside area");
    }
    for (std::size_t d = 0; d < inst.depots.size(); ++d) {
        const std::string at = "depots[" + std::to_string(d) + "]";
        if (inst.depots[d].id != inst.depot_node(static_cast<int>(d)))
            throw ParseError(at + ".id", "depot ids must follow the customer nodes (2N + d)");
        if (!inside(inst.depots[d].loc)) throw ParseError(at + ".loc", "outside area");
    }
}

inline void check_fleet(const FleetSpec& fleet, const Instance& inst) {
    if (fleet.vehicles.empty()) throw ContractViolation("fleet has no vehicles");
    for (std::size_t k = 0; k < fleet.vehicles.size(); ++k) {
        const auto& v = fleet.vehicles[k];
        const std::string at = "vehicles[" + std::to_string(k) + "]";
        if (!(v.capacity > 0)) throw ContractViolation(at + ": capacity must be positive");
        if (!(v.battery > 0)) throw ContractViolation(at + ": battery must be positive");
        if (!(v.max_speed > 0)) throw ContractViolation(at + ": max_speed must be positive");
        if (!(v.charge_rate > 0)) throw ContractViolation(at + ": charge_rate must be positive");
        if (v.battery_floor < 0 || v.battery_floor >= 1)
            throw ContractViolation(at + ": battery_floor must be in [0,1)");
        if (!inst.is_depot(v.start_depot))
            throw ContractViolation(at + ": start_depot " + std::to_string(v.start_depot) + " is not a depot node");
    }
}

// ---------------------------------------------------------------------------
// Generation

enum class WindowProfile { Uniform, PoissonPeak, Tight };

inline WindowProfile window_profile_from_string(std::string_view s) {
    if (s == "uniform") return WindowProfile::Uniform;
    if (s == "poisson-peak") return WindowProfile::PoissonPeak;
    if (s == "tight") return WindowProfile::Tight;
    throw std::invalid_argument("unknown window profile '" + std::string(s) + "'");
}

struct GeneratorConfig {
    double horizon_min = 120.0;
    double span_min = 30.0;  // delivery due = pickup open + U[span_min, span_max]
    double span_max = 60.0;
    double tight_span_min = 15.0;
    double tight_span_max = 25.0;
    double poisson_rate = 0.0;  // arrivals per minute; 0 selects n_customers / horizon
    double service_time = 2.0;
};

inline Instance generate(int n_customers, int n_depots, double area_km, WindowProfile profile,
                         std::uint64_t seed, const GeneratorConfig& cfg = {}) {
    if (n_customers < 1) throw ContractViolation("generate: n_customers must be >= 1");
    if (n_depots < 1) throw ContractViolation("generate: n_depots must be >= 1");
    if (!(area_km > 0)) throw ContractViolation("generate: area_km must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, area_km);
    std::uniform_int_distribution<int> demand(1, 10);

    Instance inst;
    inst.area_km = area_km;
    inst.seed = seed;
    inst.service_time = cfg.service_time;

    const double rate = cfg.poisson_rate > 0 ? cfg.poisson_rate : n_customers / cfg.horizon_min;
    std::exponential_distribution<double> gap(rate);
    double clock = 0.0;

    for (int i = 0; i < n_customers; ++i) {
        Customer c;
        c.id = i;
        c.pickup_loc = {coord(rng), coord(rng)};
        c.delivery_loc = {coord(rng), coord(rng)};
        c.demand = demand(rng);
        switch (profile) {
            case WindowProfile::PoissonPeak:
                clock += gap(rng);
                c.early = clock;
                break;
            case WindowProfile::Uniform:
            case WindowProfile::Tight:
                c.early = std::uniform_real_distribution<double>(0.0, cfg.horizon_min)(rng);
                break;
        }
        const bool tight = profile == WindowProfile::Tight;
        std::uniform_real_distribution<double> span(tight ? cfg.tight_span_min : cfg.span_min,
                                                    tight ? cfg.tight_span_max : cfg.span_max);
        c.late = c.early + span(rng);
        inst.customers.push_back(c);
    }
    for (int d = 0; d < n_depots; ++d)
        inst.depots.push_back({2 * n_customers + d, {coord(rng), coord(rng)}, true});
    return inst;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const CostWeights& w) {
    return {{"alpha1", w.alpha1},
            {"alpha2", w.alpha2},
            {"alpha3_early", w.alpha3_early},
            {"alpha3_late", w.alpha3_late},
            {"lambda_battery", w.lambda_battery}};
}

inline CostWeights cost_weights_from_json(const nlohmann::json& j, const std::string& at) {
    using detail::require;
    return {require<double>(j, "alpha1", at), require<double>(j, "alpha2", at),
            require<double>(j, "alpha3_early", at), require<double>(j, "alpha3_late", at),
            require<double>(j, "lambda_battery", at)};
}

inline nlohmann::json to_json(const Instance& inst) {
    using detail::point_json;
    nlohmann::json customers = nlohmann::json::array();
    for (const auto& c : inst.customers)
        customers.push_back({{"id", c.id},
                             {"pickup_loc", point_json(c.pickup_loc)},
                             {"delivery_loc", point_json(c.delivery_loc)},
                             {"early", c.early},
                             {"late", c.late},
                             {"demand", c.demand}});
    nlohmann::json depots = nlohmann::json::array();
    for (const auto& d : inst.depots)
        depots.push_back({{"id", d.id}, {"loc", point_json(d.loc)}, {"recharge", d.recharge}});
    return {{"format_version", 1},
            {"area_km", inst.area_km},
            {"seed", inst.seed},
            {"service_time", inst.service_time},
            {"cost_weights", to_json(inst.cost_weights)},
            {"rules",
             {{"wait_for_pickup", inst.rules.wait_for_pickup},
              {"charge_final_return", inst.rules.charge_final_return}}},
            {"customers", customers},
            {"depots", depots}};
}

inline Instance instance_from_json(const nlohmann::json& doc) {
    using detail::require;
    detail::require_version(doc, "format_version", 1);
    Instance inst;
    inst.area_km = require<double>(doc, "area_km", "");
    inst.seed = require<std::uint64_t>(doc, "seed", "");
    inst.service_time = require<double>(doc, "service_time", "");
    inst.cost_weights = cost_weights_from_json(require<nlohmann::json>(doc, "cost_weights", ""), "cost_weights");
    if (doc.contains("rules")) {
        const auto& r = doc.at("rules");
        inst.rules.wait_for_pickup = detail::optional_field<bool>(r, "wait_for_pickup", "rules", true);
        inst.rules.charge_final_return = detail::optional_field<bool>(r, "charge_final_return", "rules", true);
    }
    const auto customers = require<nlohmann::json>(doc, "customers", "");
    if (!customers.is_array()) throw ParseError("customers", "expected array");
    for (std::size_t i = 0; i < customers.size(); ++i) {
        const std::string at = "customers[" + std::to_string(i) + "]";
        const auto& j = customers[i];
        Customer c;
        c.id = require<int>(j, "id", at);
        c.pickup_loc = detail::require_point(j, "pickup_loc", at);
        c.delivery_loc = detail::require_point(j, "delivery_loc", at);
        c.early = require<double>(j, "early", at);
        c.late = require<double>(j, "late", at);
        c.demand = require<double>(j, "demand", at);
        inst.customers.push_back(c);
    }
    const auto depots = require<nlohmann::json>(doc, "depots", "");
    if (!depots.is_array()) throw ParseError("depots", "expected array");
    for (std::size_t d = 0; d < depots.size(); ++d) {
        const std::string at = "depots[" + std::to_string(d) + "]";
        Depot dep;
        dep.id = require<int>(depots[d], "id", at);
        dep.loc = detail::require_point(depots[d], "loc", at);
        dep.recharge = detail::optional_field<bool>(depots[d], "recharge", at, true);
        inst.depots.push_back(dep);
    }
    check_instance(inst);
    return inst;
}

inline Instance load_instance(const std::string& path) { return instance_from_json(detail::read_json_file(path)); }

inline void save_instance(const Instance& inst, const std::string& path) {
    detail::write_json_file(path, to_json(inst));
}

inline nlohmann::json to_json(const FleetSpec& fleet) {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : fleet.vehicles)
        vs.push_back({{"mode", std::string(to_string(v.mode))},
                      {"max_speed", v.max_speed},
                      {"capacity", v.capacity},
                      {"battery", v.battery},
                      {"charge_rate", v.charge_rate},
                      {"battery_floor", v.battery_floor},
                      {"start_depot", v.start_depot}});
    return {{"vehicles", vs}};
}

inline FleetSpec fleet_from_json(const nlohmann::json& doc) {
    using detail::require;
    FleetSpec fleet;
    const auto vs = require<nlohmann::json>(doc, "vehicles", "fleet");
    for (std::size_t k = 0; k < vs.size(); ++k) {
        const std::string at = "fleet.vehicles[" + std::to_string(k) + "]";
        VehicleSpec v;
        try {
            v.mode = mode_from_string(require<std::string>(vs[k], "mode", at));
        } catch (const std::invalid_argument& e) {
            throw ParseError(at + ".mode", e.what());
        }
        v.max_speed = require<double>(vs[k], "max_speed", at);
        v.capacity = require<double>(vs[k], "capacity", at);
        v.battery = require<double>(vs[k], "battery", at);
        v.charge_rate = require<double>(vs[k], "charge_rate", at);
        v.battery_floor = require<double>(vs[k], "battery_floor", at);
        v.start_depot = require<int>(vs[k], "start_depot", at);
        fleet.vehicles.push_back(v);
    }
    return fleet;
}

}  // namespace cpdptw
