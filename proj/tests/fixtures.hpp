#pragma once

#include <random>

#include "cpdptw/cpdptw.hpp"

namespace fixtures {

using namespace cpdptw;

struct Case {
    Instance inst;
    FleetSpec fleet;
};

/// Small seeded instance: 1-4 customers, 2-3 vehicles with at least one ADR, 1-2 depots, a
/// 3 km area; every other block of 32 seeds uses short batteries so recharge stops matter.
inline Case small_case(int seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const int n = 1 + seed % 4;
    const int k = 2 + (seed / 4) % 2;
    const int depots = 1 + (seed / 8) % 2;
    const auto profile = (seed / 16) % 2 ? WindowProfile::Tight : WindowProfile::Uniform;
    Case c;
    c.inst = generate(n, depots, 3.0, profile, 1000 + static_cast<std::uint64_t>(seed));
    const int n_uav = std::uniform_int_distribution<int>(0, k - 1)(rng);
    c.fleet = make_fleet(c.inst, n_uav, k - n_uav);
    if ((seed / 32) % 2)
        for (auto& v : c.fleet.vehicles) v.battery = v.mode == Mode::UAV ? 1.2 : 1.0;
    return c;
}

inline Simulator simulator(const Case& c, PhysicsConfig phys = {}) {
    return Simulator(c.inst, c.fleet, build_network(c.inst), phys);
}

}  // namespace fixtures
