#include <random>

#include <gtest/gtest.h>

#include "cpdptw/cpdptw.hpp"
#include "oracles.hpp"

using namespace cpdptw;

namespace {

int direct_edges(const ModeGraph& g) {
    int n = 0;
    for (const Edge& e : g.edges()) n += is_direct(g, e);
    return n;
}

}  // namespace

TEST(Network, DijkstraAgreesWithFloydWarshall) {
    for (int seed = 0; seed < 12; ++seed) {
        const Instance inst = generate(4 + seed % 3, 2, 3.0, WindowProfile::Uniform, 300 + seed);
        NetworkOptions opt;
        opt.road_grid = seed % 2 == 0;
        opt.grid_spacing_km = 0.75;
        const DualNetwork net = build_network(inst, opt, {kInf, kInf, 0.4, static_cast<std::uint64_t>(seed)});
        for (const ModeGraph* g : {&net.uav, &net.adr}) {
            const auto ref = oracle::all_pairs(*g);
            const TravelTable table(*g);
            for (int i = 0; i < table.n_key(); ++i)
                for (int j = 0; j < table.n_key(); ++j) {
                    if (ref[i][j] == kInf) {
                        EXPECT_FALSE(table.reachable(i, j));
                        continue;
                    }
                    ASSERT_TRUE(table.reachable(i, j));
                    EXPECT_NEAR(table.distance_m(i, j), ref[i][j], 1e-6 * (1 + ref[i][j]));
                    // the stored path is a walk over existing edges summing to the distance
                    const Path& p = *table.path(i, j);
                    double len = 0.0;
                    for (int e : p.edges) len += g->edges()[e].length_m;
                    EXPECT_NEAR(len, p.distance_m, 1e-9 * (1 + len));
                    EXPECT_EQ(p.nodes.front(), i);
                    EXPECT_EQ(p.nodes.back(), j);
                }
        }
    }
}

TEST(Network, StraightLineDistancesWithoutGrid) {
    const Instance inst = generate(3, 1, 4.0, WindowProfile::Uniform, 8);
    const DualNetwork net = build_network(inst);
    const TravelTable uav(net.uav), adr(net.adr);
    for (int i = 0; i < inst.n_nodes(); ++i)
        for (int j = 0; j < inst.n_nodes(); ++j) {
            const double straight = distance_km(inst.location(i), inst.location(j)) * 1000.0;
            EXPECT_NEAR(uav.distance_m(i, j), straight, 1e-9 * (1 + straight));
            EXPECT_NEAR(adr.distance_m(i, j), straight, 1e-9 * (1 + straight));
        }
}

TEST(Network, GridKeepsAdrOnRoads) {
    const Instance inst = generate(4, 2, 3.0, WindowProfile::Uniform, 2);
    NetworkOptions opt;
    opt.road_grid = true;
    const DualNetwork net = build_network(inst, opt);
    EXPECT_EQ(direct_edges(net.adr), 0);
    EXPECT_GT(direct_edges(net.uav), 0);
    EXPECT_GT(net.adr.n_nodes(), inst.n_nodes());
    const TravelTable uav(net.uav), adr(net.adr);
    for (int i = 0; i < inst.n_nodes(); ++i)
        for (int j = 0; j < inst.n_nodes(); ++j) {
            ASSERT_TRUE(adr.reachable(i, j));
            EXPECT_LE(uav.distance_m(i, j), adr.distance_m(i, j) + 1e-9);
        }
}

TEST(Network, DistancesAreSymmetric) {
    const Instance inst = generate(5, 2, 3.0, WindowProfile::Uniform, 4);
    NetworkOptions opt;
    opt.road_grid = true;
    const DualNetwork net = build_network(inst, opt, {kInf, kInf, 0.5, 3});
    for (const ModeGraph* g : {&net.uav, &net.adr}) {
        const TravelTable t(*g);
        for (int i = 0; i < t.n_key(); ++i)
            for (int j = 0; j < t.n_key(); ++j) EXPECT_NEAR(t.distance_m(i, j), t.distance_m(j, i), 1e-9);
    }
}

TEST(Network, DensityExtremes) {
    const Instance inst = generate(5, 2, 3.0, WindowProfile::Uniform, 6);
    const DualNetwork open = build_network(inst, {}, {kInf, kInf, 0.0, 1});
    const DualNetwork closed = build_network(inst, {}, {kInf, kInf, 1.0, 1});
    const int n = inst.n_nodes();
    EXPECT_EQ(direct_edges(open.uav), n * (n - 1));
    EXPECT_EQ(direct_edges(closed.uav), 0);
    // ADRs are never blocked
    EXPECT_EQ(direct_edges(closed.adr), n * (n - 1));
    const TravelTable t(closed.uav);
    EXPECT_FALSE(t.reachable(0, 1));
    EXPECT_TRUE(t.reachable(0, 0));
}

TEST(Network, DensityIsMonotoneAndSeeded) {
    const Instance inst = generate(8, 2, 3.0, WindowProfile::Uniform, 6);
    int last = 1 << 30;
    for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const int kept = direct_edges(build_network(inst, {}, {kInf, kInf, rho, 11}).uav);
        EXPECT_LE(kept, last);
        last = kept;
    }
    const auto a = build_network(inst, {}, {kInf, kInf, 0.5, 11});
    const auto b = build_network(inst, {}, {kInf, kInf, 0.5, 11});
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_THROW(build_network(inst, {}, {kInf, kInf, 1.5, 11}), ContractViolation);
}

TEST(Network, JsonRoundTrip) {
    const Instance inst = generate(3, 2, 2.0, WindowProfile::Uniform, 1);
    NetworkOptions opt;
    opt.road_grid = true;
    const DualNetwork a = build_network(inst, opt, {kInf, kInf, 0.3, 2});
    const DualNetwork b = network_from_json(to_json(a));
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    auto bad = to_json(a);
    bad.erase("format_version");
    EXPECT_THROW(network_from_json(bad), ParseError);
}

TEST(Network, NeighbourhoodRelations) {
    const Instance inst = generate(6, 1, 5.0, WindowProfile::Uniform, 13);
    const AdjacencySpec tight{10.0, 1.0, 0.0, 0};
    const auto temporal = temporal_adjacency(inst, tight);
    const auto spatial = spatial_adjacency(inst, tight);
    for (int i = 0; i < 6; ++i) {
        EXPECT_FALSE(temporal[i][i]);
        for (int j = 0; j < 6; ++j) {
            if (i == j) continue;
            EXPECT_EQ(temporal[i][j], temporal[j][i]);
            const double dt = std::abs(inst.customers[i].late - inst.customers[j].late);
            EXPECT_EQ(static_cast<bool>(temporal[i][j]), dt <= 10.0);
            const double dx = distance_km(inst.customers[i].pickup_loc, inst.customers[j].pickup_loc);
            EXPECT_EQ(static_cast<bool>(spatial[i][j]), dx <= 1.0);
        }
    }
    const AdjacencySpec all{};
    const auto every = node_spatial_adjacency(inst, all);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) EXPECT_EQ(static_cast<bool>(every[i][j]), i != j);
    // a pickup always shares its own delivery's due time
    const auto node_t = node_temporal_adjacency(inst, {0.001, kInf, 0.0, 0});
    for (int c = 0; c < 6; ++c) EXPECT_TRUE(node_t[inst.pickup_node(c)][inst.delivery_node(c)]);
}

TEST(Network, EdgeFeaturesMatchDefinition) {
    const Instance inst = generate(4, 1, 3.0, WindowProfile::Uniform, 5);
    const DualNetwork net = build_network(inst);
    const TravelTable t(net.uav);
    const auto feats = edge_features(inst, t, Mode::UAV, 20.0, {});
    EXPECT_EQ(feats.size(), 8u * 7u);
    for (const auto& f : feats) {
        const double straight_min = distance_km(inst.location(f.i), inst.location(f.j)) * 1000.0 / 20.0 / 60.0;
        EXPECT_NEAR(f.value, std::abs(inst.node_early(f.i) - inst.node_late(f.j) - straight_min), 1e-9);
    }
    EXPECT_THROW(edge_features(inst, t, Mode::UAV, 0.0, {}), ContractViolation);
}
