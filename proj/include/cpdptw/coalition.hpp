#pragma once

// Cooperative-game analysis over fleet agents: characteristic function by bottom-up composition,
// sub-additivity / convexity checks, LP core test, and the (UAV count, ADR count) sweep.

#include <atomic>
#include <bit>
#include <cstdint>
#include <map>
#include <thread>

#include "cpdptw/simplex.hpp"
#include "cpdptw/solver.hpp"

namespace cpdptw {

using Coalition = std::uint32_t;  // bit k set = agent k participates

inline constexpr int kMaxAgents = 20;

inline Coalition grand_coalition(int n_agents) { return (Coalition{1} << n_agents) - 1; }

inline std::vector<int> members(Coalition s) {
    std::vector<int> out;
    for (int k = 0; s >> k; ++k)
        if (s >> k & 1) out.push_back(k);
    return out;
}

struct Witness {
    Coalition s1 = 0, s2 = 0;
    double lhs = 0.0, rhs = 0.0;
};

struct CheckResult {
    bool holds = true;
    std::optional<Witness> witness;
};

struct CoreResult {
    bool nonempty = false;
    std::vector<double> allocation;  // per agent; empty when the core is empty
};

struct CoalitionTable {
    std::vector<std::string> agents;
    std::vector<double> cost;  // indexed by coalition bitmask; cost[0] = 0; +inf when infeasible

    int n_agents() const { return static_cast<int>(agents.size()); }
    double operator[](Coalition s) const { return cost.at(s); }
};

namespace detail {

inline void check_complete(const CoalitionTable& t) {
    if (t.n_agents() < 1 || t.n_agents() > kMaxAgents) throw ContractViolation("coalition table: bad agent count");
    if (t.cost.size() != (std::size_t{1} << t.n_agents())) throw ContractViolation("coalition table is incomplete");
    if (t.cost[0] != 0.0) throw ContractViolation("coalition table: C(empty) must be 0");
    for (double c : t.cost)
        if (std::isnan(c)) throw ContractViolation("coalition table has NaN entries");
}

inline bool leq(double a, double b, double tol) { return a == kInf ? b == kInf : a <= b + tol * (1.0 + std::abs(b)); }

}  // namespace detail

/// Fills C(S) = min(C^R(S), min over bipartitions C(S1) + C(S2)) in order of coalition size.
/// `direct` returns C^R(S) for a nonempty coalition, +inf when infeasible.
inline CoalitionTable compose_table(std::vector<std::string> agents, const std::function<double(Coalition)>& direct) {
    CoalitionTable t;
    t.agents = std::move(agents);
    const int n = t.n_agents();
    if (n < 1 || n > kMaxAgents) throw ContractViolation("compose_table: bad agent count");
    const Coalition full = grand_coalition(n);
    t.cost.assign(std::size_t{full} + 1, kInf);
    t.cost[0] = 0.0;
    std::vector<Coalition> order;
    for (Coalition s = 1; s <= full; ++s) order.push_back(s);
    std::stable_sort(order.begin(), order.end(), [](Coalition a, Coalition b) { return std::popcount(a) < std::popcount(b); });
    for (Coalition s : order) {
        double best = direct(s);
        const Coalition low = s & (~s + 1);
        for (Coalition a = (s - 1) & s; a; a = (a - 1) & s) {
            if (!(a & low)) continue;  // each bipartition once
            best = std::min(best, t.cost[a] + t.cost[s ^ a]);
        }
        t.cost[s] = best;
    }
    return t;
}

inline CheckResult check_subadditivity(const CoalitionTable& t, double tol = 1e-9) {
    detail::check_complete(t);
    const Coalition full = grand_coalition(t.n_agents());
    for (Coalition a = 1; a <= full; ++a)
        for (Coalition b = a + 1; b <= full; ++b) {
            if (a & b) continue;
            const double lhs = t.cost[a | b], rhs = t.cost[a] + t.cost[b];
            if (!detail::leq(lhs, rhs, tol)) return {false, Witness{a, b, lhs, rhs}};
        }
    return {};
}

/// C(S1 u S2) + C(S1 n S2) <= C(S1) + C(S2) for every pair.
inline CheckResult check_convexity(const CoalitionTable& t, double tol = 1e-9) {
    detail::check_complete(t);
    const Coalition full = grand_coalition(t.n_agents());
    for (Coalition a = 1; a <= full; ++a)
        for (Coalition b = a + 1; b <= full; ++b) {
            const double lhs = t.cost[a | b] + t.cost[a & b], rhs = t.cost[a] + t.cost[b];
            if (!detail::leq(lhs, rhs, tol)) return {false, Witness{a, b, lhs, rhs}};
        }
    return {};
}

/// Finds x with sum over N of x = C(N) and sum over S of x <= C(S) for every proper S.
/// Coalitions with infinite cost impose no constraint.
inline CoreResult core_check(const CoalitionTable& t) {
    detail::check_complete(t);
    const int n = t.n_agents();
    const Coalition full = grand_coalition(n);
    if (t.cost[full] == kInf) throw ContractViolation("core_check: grand coalition cost is infinite");
    FeasibilityLP lp;
    lp.n_vars = n;
    for (Coalition s = 1; s < full; ++s) {
        if (t.cost[s] == kInf) continue;
        std::vector<double> row(n, 0.0);
        for (int k : members(s)) row[k] = 1.0;
        lp.rows_le.push_back(std::move(row));
        lp.rhs_le.push_back(t.cost[s]);
    }
    lp.rows_eq.push_back(std::vector<double>(n, 1.0));
    lp.rhs_eq.push_back(t.cost[full]);
    const auto res = phase_one(lp);
    if (!res.feasible) return {};
    // independent substitution check of the returned allocation
    double worst = 0.0;
    for (std::size_t r = 0; r < lp.rows_le.size(); ++r) {
        double lhs = 0.0;
        for (int k = 0; k < n; ++k) lhs += lp.rows_le[r][k] * res.x[k];
        worst = std::max(worst, lhs - lp.rhs_le[r]);
    }
    double sum = 0.0;
    for (double v : res.x) sum += v;
    worst = std::max(worst, std::abs(sum - t.cost[full]));
    if (worst > 1e-7 * (1.0 + std::abs(t.cost[full]))) throw NumericError("core_check: allocation fails substitution", worst);
    return {true, res.x};
}

// ---------------------------------------------------------------------------
// Characteristic function from solvers

inline FleetSpec sub_fleet(const FleetSpec& fleet, Coalition s) {
    FleetSpec out;
    for (int k : members(s)) out.vehicles.push_back(fleet.vehicles.at(k));
    return out;
}

struct CoalitionSetup {
    Instance inst;
    FleetSpec fleet;  // one agent per vehicle
    DualNetwork nets;
    PhysicsConfig phys;
    SolverKind solver = SolverKind::Auto;
    SolverLimits limits;
    std::map<Coalition, double> fixed;  // externally supplied route costs used as C^R(S) upper bounds
};

/// C^R(S): the solver cost with exactly the vehicles in S (or the tighter of that and a fixed
/// value). +inf when no feasible plan exists.
inline double direct_cost(const CoalitionSetup& cfg, Coalition s) {
    double c = kInf;
    if (auto it = cfg.fixed.find(s); it != cfg.fixed.end()) c = it->second;
    const Simulator sim(cfg.inst, sub_fleet(cfg.fleet, s), cfg.nets, cfg.phys);
    const auto rep = solve(sim, cfg.solver, cfg.limits);
    if (rep.feasible) c = std::min(c, rep.solution.cost.total);
    return c;
}

inline std::string agent_label(const FleetSpec& fleet, int k) {
    int idx = 0;
    for (int j = 0; j <= k; ++j)
        if (fleet.vehicles[j].mode == fleet.vehicles[k].mode) ++idx;
    return std::string(fleet.vehicles[k].mode == Mode::UAV ? "D" : "R") + std::to_string(idx);
}

inline CoalitionTable characteristic_table(const CoalitionSetup& cfg) {
    std::vector<std::string> names;
    for (int k = 0; k < cfg.fleet.size(); ++k) names.push_back(agent_label(cfg.fleet, k));
    return compose_table(std::move(names), [&](Coalition s) { return direct_cost(cfg, s); });
}

// ---------------------------------------------------------------------------
// Sweep over (d UAVs, r ADRs) with interchangeable agents per mode

struct SweepCell {
    int d = 0, r = 0;
    double cost = kInf;   // C of the coalition of d UAVs and r ADRs
    double gain = kInf;   // sum of individual costs minus cost
    bool core_nonempty = false;
    bool failed = false;
    std::string error;
};

struct SweepResult {
    int m = 0, n = 0;
    double uav_alone = kInf, adr_alone = kInf;
    std::vector<SweepCell> cells;  // row-major over d = 1..m, r = 1..n
    std::vector<std::string> notes;
};

/// Class-level table: entry (d, r) is C for d UAVs plus r ADRs built with make_fleet.
class ClassTable {
public:
    ClassTable(int m, int n) : m_(m), n_(n), c_((m + 1) * (n + 1), kInf) { c_[0] = 0.0; }
    double& at(int d, int r) { return c_[d * (n_ + 1) + r]; }
    double at(int d, int r) const { return c_[d * (n_ + 1) + r]; }
    int m() const { return m_; }
    int n() const { return n_; }

    /// Per-agent table over d UAVs then r ADRs.
    CoalitionTable expand(int d, int r) const {
        std::vector<std::string> names;
        for (int i = 1; i <= d; ++i) names.push_back("D" + std::to_string(i));
        for (int i = 1; i <= r; ++i) names.push_back("R" + std::to_string(i));
        CoalitionTable t;
        t.agents = names;
        const Coalition full = grand_coalition(d + r);
        const Coalition uav_bits = grand_coalition(d);
        t.cost.resize(std::size_t{full} + 1);
        for (Coalition s = 0; s <= full; ++s) t.cost[s] = at(std::popcount(s & uav_bits), std::popcount(s & ~uav_bits));
        return t;
    }

private:
    int m_, n_;
    std::vector<double> c_;
};

struct SweepSetup {
    Instance inst;
    DualNetwork nets;
    PhysicsConfig phys;
    SolverKind solver = SolverKind::Auto;
    SolverLimits limits;
    int threads = 1;
};

inline SweepResult coalition_sweep(const SweepSetup& cfg, int m, int n) {
    if (m < 1 || n < 1) throw ContractViolation("coalition_sweep: m and n must be at least 1");
    if (m + n > kMaxAgents) throw ContractViolation("coalition_sweep: too many agents");
    ClassTable direct(m, n);
    std::vector<std::string> errors((m + 1) * (n + 1));
    std::vector<std::pair<int, int>> jobs;
    for (int d = 0; d <= m; ++d)
        for (int r = 0; r <= n; ++r)
            if (d + r > 0) jobs.emplace_back(d, r);
    auto run = [&](std::size_t j) {
        const auto [d, r] = jobs[j];
        try {
            const Simulator sim(cfg.inst, make_fleet(cfg.inst, d, r), cfg.nets, cfg.phys);
            const auto rep = solve(sim, cfg.solver, cfg.limits);
            direct.at(d, r) = rep.feasible ? rep.solution.cost.total : kInf;
        } catch (const std::exception& e) {
            errors[d * (n + 1) + r] = e.what();
            direct.at(d, r) = kInf;
        }
    };
    const int threads = std::max(1, cfg.threads);
    if (threads == 1) {
        for (std::size_t j = 0; j < jobs.size(); ++j) run(j);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t j; (j = next++) < jobs.size();) run(j);
            });
        for (auto& th : pool) th.join();
    }
    // bottom-up composition over class splits
    ClassTable composed(m, n);
    for (int size = 1; size <= m + n; ++size)
        for (int d = 0; d <= m; ++d) {
            const int r = size - d;
            if (r < 0 || r > n) continue;
            double best = direct.at(d, r);
            for (int d1 = 0; d1 <= d; ++d1)
                for (int r1 = 0; r1 <= r; ++r1) {
                    if (d1 + r1 == 0 || d1 + r1 == size) continue;
                    best = std::min(best, composed.at(d1, r1) + composed.at(d - d1, r - r1));
                }
            composed.at(d, r) = best;
        }
    SweepResult res;
    res.m = m;
    res.n = n;
    res.uav_alone = composed.at(1, 0);
    res.adr_alone = composed.at(0, 1);
    for (int d = 1; d <= m; ++d)
        for (int r = 1; r <= n; ++r) {
            SweepCell cell;
            cell.d = d;
            cell.r = r;
            cell.cost = composed.at(d, r);
            cell.error = errors[d * (n + 1) + r];
            cell.failed = !cell.error.empty();
            const double individual = d * res.uav_alone + r * res.adr_alone;
            cell.gain = individual == kInf ? kInf : individual - cell.cost;
            if (cell.cost < kInf) {
                try {
                    cell.core_nonempty = core_check(composed.expand(d, r)).nonempty;
                } catch (const std::exception& e) {
                    cell.failed = true;
                    cell.error = e.what();
                }
            }
            res.cells.push_back(cell);
        }
    return res;
}

namespace detail {

inline std::string fmt_num(double v) {
    if (v == kInf) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string coalition_name(const CoalitionTable& t, Coalition s) {
    std::string out = "{";
    for (int k : members(s)) out += (out.size() > 1 ? "," : "") + t.agents[k];
    return out + "}";
}

}  // namespace detail

/// Matrix CSV: d,r,C,gain,core_nonempty
inline void write_sweep_csv(std::ostream& out, const SweepResult& res) {
    out << "d,r,C,gain,core_nonempty\n";
    for (const auto& c : res.cells)
        out << c.d << ',' << c.r << ',' << detail::fmt_num(c.cost) << ',' << detail::fmt_num(c.gain) << ','
            << (c.failed ? "failed" : c.core_nonempty ? "true" : "false") << '\n';
}

inline void write_table_summary(std::ostream& out, const CoalitionTable& t) {
    for (Coalition s = 1; s < t.cost.size(); ++s)
        out << "C" << detail::coalition_name(t, s) << " = " << detail::fmt_num(t.cost[s]) << '\n';
    const auto sub = check_subadditivity(t);
    const auto conv = check_convexity(t);
    out << "subadditive: " << (sub.holds ? "yes" : "no");
    if (sub.witness)
        out << " (witness " << detail::coalition_name(t, sub.witness->s1) << " + " << detail::coalition_name(t, sub.witness->s2)
            << ": " << detail::fmt_num(sub.witness->lhs) << " > " << detail::fmt_num(sub.witness->rhs) << ")";
    out << "\nconvex: " << (conv.holds ? "yes" : "no");
    if (conv.witness)
        out << " (witness " << detail::coalition_name(t, conv.witness->s1) << ", " << detail::coalition_name(t, conv.witness->s2)
            << ": " << detail::fmt_num(conv.witness->lhs) << " > " << detail::fmt_num(conv.witness->rhs) << ")";
    out << '\n';
    if (t.cost.back() == kInf) {
        out << "core: grand coalition infeasible\n";
        return;
    }
    const auto core = core_check(t);
    out << "core: " << (core.nonempty ? "nonempty" : "empty");
    if (core.nonempty) {
        out << ", allocation";
        for (int k = 0; k < t.n_agents(); ++k) out << ' ' << t.agents[k] << '=' << detail::fmt_num(core.allocation[k]);
    }
    out << '\n';
}

}  // namespace cpdptw
