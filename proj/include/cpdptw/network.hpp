#pragma once

// Aerial and ground graphs over the shared customer/depot nodes, shortest paths,
// obstacle density, and the spatio-temporal neighbourhoods.

#include <algorithm>
#include <memory>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "cpdptw/common.hpp"
#include "cpdptw/instance.hpp"
#include "cpdptw/json_util.hpp"

namespace cpdptw {

enum class NodeKind : std::uint8_t { CustomerPickup, CustomerDelivery, Depot, Intermediary };

inline std::string_view to_string(NodeKind k) {
    switch (k) {
        case NodeKind::CustomerPickup: return "customer-pickup";
        case NodeKind::CustomerDelivery: return "customer-delivery";
        case NodeKind::Depot: return "depot";
        case NodeKind::Intermediary: return "intermediary";
    }
    return "?";
}

inline NodeKind node_kind_from_string(std::string_view s) {
    if (s == "customer-pickup") return NodeKind::CustomerPickup;
    if (s == "customer-delivery") return NodeKind::CustomerDelivery;
    if (s == "depot") return NodeKind::Depot;
    if (s == "intermediary") return NodeKind::Intermediary;
    throw std::invalid_argument("unknown node kind '" + std::string(s) + "'");
}

struct GraphNode {
    Point pos;
    NodeKind kind = NodeKind::Intermediary;
};

struct Edge {
    int from = 0;
    int to = 0;
    double length_m = 0.0;
    double speed_cap = kInf;  // m/s
    bool allowed = true;
};

class ModeGraph {
public:
    ModeGraph() = default;
    explicit ModeGraph(Mode mode) : mode_(mode) {}

    Mode mode() const { return mode_; }
    int n_nodes() const { return static_cast<int>(nodes_.size()); }
    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& out_edges(int node) const { return out_[node]; }

    int add_node(GraphNode n) {
        nodes_.push_back(n);
        out_.emplace_back();
        return n_nodes() - 1;
    }

    void add_edge(Edge e) {
        if (e.from < 0 || e.from >= n_nodes() || e.to < 0 || e.to >= n_nodes())
            throw ContractViolation("edge endpoint out of range");
        if (!(e.length_m > 0)) throw ContractViolation("edge length must be positive");
        out_[e.from].push_back(static_cast<int>(edges_.size()));
        edges_.push_back(e);
    }

    /// Replaces the edge set, keeping nodes.
    ModeGraph with_edges(const std::vector<Edge>& edges) const {
        ModeGraph g(mode_);
        for (const auto& n : nodes_) g.add_node(n);
        for (const auto& e : edges) g.add_edge(e);
        return g;
    }

    bool is_key(int node) const { return nodes_[node].kind != NodeKind::Intermediary; }

private:
    Mode mode_ = Mode::UAV;
    std::vector<GraphNode> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> out_;
};

struct Path {
    std::vector<int> nodes;
    std::vector<int> edges;
    double distance_m = 0.0;
};

struct ShortestPathTree {
    std::vector<double> dist;
    std::vector<int> pred_edge;  // -1 for the source and unreached nodes
};

/// Dijkstra on edge length over allowed edges. Nodes settle in (distance, index) order and
/// predecessors change only on strict improvement, so paths are deterministic.
inline ShortestPathTree dijkstra(const ModeGraph& g, int source) {
    const int n = g.n_nodes();
    ShortestPathTree t{std::vector<double>(n, kInf), std::vector<int>(n, -1)};
    std::vector<char> done(n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    t.dist[source] = 0.0;
    pq.push({0.0, source});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        for (int ei : g.out_edges(u)) {
            const Edge& e = g.edges()[ei];
            if (!e.allowed) continue;
            const double nd = d + e.length_m;
            if (nd < t.dist[e.to]) {
                t.dist[e.to] = nd;
                t.pred_edge[e.to] = ei;
                pq.push({nd, e.to});
            }
        }
    }
    return t;
}

inline std::optional<Path> extract_path(const ModeGraph& g, const ShortestPathTree& t, int source, int target) {
    if (t.dist[target] == kInf) return std::nullopt;
    Path p;
    p.distance_m = t.dist[target];
    for (int v = target; v != source;) {
        const int ei = t.pred_edge[v];
        p.edges.push_back(ei);
        p.nodes.push_back(v);
        v = g.edges()[ei].from;
    }
    p.nodes.push_back(source);
    std::reverse(p.nodes.begin(), p.nodes.end());
    std::reverse(p.edges.begin(), p.edges.end());
    return p;
}

/// Minimal-length path from i to j; nullopt when j is unreachable.
inline std::optional<Path> shortest_path(const ModeGraph& g, int i, int j) {
    if (i < 0 || i >= g.n_nodes() || j < 0 || j >= g.n_nodes())
        throw ContractViolation("shortest_path: node out of range");
    return extract_path(g, dijkstra(g, i), i, j);
}

/// All-pairs shortest paths between the key (non-intermediary) nodes, built once up front.
class TravelTable {
public:
    TravelTable() = default;
    explicit TravelTable(ModeGraph graph) : graph_(std::make_shared<const ModeGraph>(std::move(graph))) {
        const ModeGraph& g = *graph_;
        n_key_ = 0;
        while (n_key_ < g.n_nodes() && g.is_key(n_key_)) ++n_key_;
        paths_.assign(static_cast<std::size_t>(n_key_) * n_key_, std::nullopt);
        for (int i = 0; i < n_key_; ++i) {
            const auto tree = dijkstra(g, i);
            for (int j = 0; j < n_key_; ++j) paths_[idx(i, j)] = extract_path(g, tree, i, j);
        }
    }

    const ModeGraph& graph() const { return *graph_; }
    int n_key() const { return n_key_; }
    bool reachable(int i, int j) const { return paths_[idx(i, j)].has_value(); }
    double distance_m(int i, int j) const {
        const auto& p = paths_[idx(i, j)];
        return p ? p->distance_m : kInf;
    }
    const std::optional<Path>& path(int i, int j) const { return paths_[idx(i, j)]; }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_key_ + j; }

    std::shared_ptr<const ModeGraph> graph_;
    int n_key_ = 0;
    std::vector<std::optional<Path>> paths_;
};

struct AdjacencySpec {
    double zeta = kInf;  // min
    double mu = kInf;    // km
    double rho = 0.0;    // obstacle density
    std::uint64_t seed = 0;
};

inline void check_spec(const AdjacencySpec& s) {
    if (!(s.zeta > 0)) throw ContractViolation("AdjacencySpec: zeta must be positive");
    if (!(s.mu > 0)) throw ContractViolation("AdjacencySpec: mu must be positive");
    if (s.rho < 0 || s.rho > 1) throw ContractViolation("AdjacencySpec: rho must be in [0,1]");
}

inline bool is_direct(const ModeGraph& g, const Edge& e) { return g.is_key(e.from) && g.is_key(e.to); }

/// Blocks each direct key-to-key UAV edge pair with probability rho. The draw depends only on
/// (seed, unordered endpoint pair), so both directions share one obstacle. ADR graphs pass through.
inline ModeGraph apply_density(const ModeGraph& g, const AdjacencySpec& spec) {
    check_spec(spec);
    if (g.mode() != Mode::UAV || spec.rho == 0.0) return g;
    std::vector<Edge> kept;
    for (const Edge& e : g.edges()) {
        if (is_direct(g, e)) {
            const auto lo = static_cast<std::uint64_t>(std::min(e.from, e.to));
            const auto hi = static_cast<std::uint64_t>(std::max(e.from, e.to));
            const double u = detail::unit_from_hash(detail::hash_combine(spec.seed, (lo << 32) | hi));
            if (u < spec.rho) continue;
        }
        kept.push_back(e);
    }
    return g.with_edges(kept);
}

struct NetworkOptions {
    bool road_grid = false;
    double grid_spacing_km = 0.5;
    bool uav_direct = true;  // point-to-point UAV edges (subject to density)
};

struct DualNetwork {
    ModeGraph uav{Mode::UAV};
    ModeGraph adr{Mode::ADR};

    const ModeGraph& graph(Mode m) const { return m == Mode::UAV ? uav : adr; }
};

/// Dual network with both graphs sharing node numbering. Without a road grid both modes travel
/// straight lines; with one, intermediary lattice nodes carry road edges for both modes, ADRs are
/// confined to them, and UAVs may additionally fly direct.
inline DualNetwork build_network(const Instance& inst, const NetworkOptions& opt = {},
                                 const AdjacencySpec& density = {}) {
    DualNetwork net;
    std::vector<GraphNode> nodes;
    for (int v = 0; v < inst.n_nodes(); ++v) {
        const NodeKind kind = inst.is_pickup(v)     ? NodeKind::CustomerPickup
                              : inst.is_delivery(v) ? NodeKind::CustomerDelivery
                                                    : NodeKind::Depot;
        nodes.push_back({inst.location(v), kind});
    }
    const int n_key = static_cast<int>(nodes.size());
    int side = 0;
    if (opt.road_grid) {
        side = static_cast<int>(std::ceil(inst.area_km / opt.grid_spacing_km)) + 1;
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c)
                nodes.push_back({{c * opt.grid_spacing_km, r * opt.grid_spacing_km}, NodeKind::Intermediary});
    }
    for (const auto& n : nodes) {
        net.uav.add_node(n);
        net.adr.add_node(n);
    }
    auto both_ways = [&](ModeGraph& g, int a, int b) {
        const double len = distance_km(nodes[a].pos, nodes[b].pos) * 1000.0;
        if (len <= 0) return;
        g.add_edge({a, b, len, kInf, true});
        g.add_edge({b, a, len, kInf, true});
    };
    if (opt.road_grid) {
        auto lattice = [&](int r, int c) { return n_key + r * side + c; };
        for (int r = 0; r < side; ++r)
            for (int c = 0; c < side; ++c) {
                if (c + 1 < side) {
                    both_ways(net.uav, lattice(r, c), lattice(r, c + 1));
                    both_ways(net.adr, lattice(r, c), lattice(r, c + 1));
                }
                if (r + 1 < side) {
                    both_ways(net.uav, lattice(r, c), lattice(r + 1, c));
                    both_ways(net.adr, lattice(r, c), lattice(r + 1, c));
                }
            }
        for (int v = 0; v < n_key; ++v) {
            const int c = std::clamp(static_cast<int>(std::lround(nodes[v].pos.x / opt.grid_spacing_km)), 0, side - 1);
            const int r = std::clamp(static_cast<int>(std::lround(nodes[v].pos.y / opt.grid_spacing_km)), 0, side - 1);
            both_ways(net.uav, v, lattice(r, c));
            both_ways(net.adr, v, lattice(r, c));
        }
    }
    for (int a = 0; a < n_key; ++a)
        for (int b = a + 1; b < n_key; ++b) {
            if (opt.uav_direct || !opt.road_grid) both_ways(net.uav, a, b);
            if (!opt.road_grid) both_ways(net.adr, a, b);
        }
    net.uav = apply_density(net.uav, density);
    return net;
}

// ---------------------------------------------------------------------------
// Neighbourhoods

using BoolMatrix = std::vector<std::vector<std::uint8_t>>;

/// Customer-level: A[i][j] = 1 iff |l_i - l_j| <= zeta, i != j.
inline BoolMatrix temporal_adjacency(const Instance& inst, const AdjacencySpec& spec) {
    check_spec(spec);
    const int n = inst.n_customers();
    BoolMatrix a(n, std::vector<std::uint8_t>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && std::abs(inst.customers[i].late - inst.customers[j].late) <= spec.zeta) a[i][j] = 1;
    return a;
}

/// Customer-level: A[i][j] = 1 iff the pickup locations lie within mu km, i != j.
inline BoolMatrix spatial_adjacency(const Instance& inst, const AdjacencySpec& spec) {
    check_spec(spec);
    const int n = inst.n_customers();
    BoolMatrix a(n, std::vector<std::uint8_t>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && distance_km(inst.customers[i].pickup_loc, inst.customers[j].pickup_loc) <= spec.mu)
                a[i][j] = 1;
    return a;
}

/// Node-level temporal neighbourhood over the 2N customer nodes (each node carries its
/// customer's window, so a pickup is always adjacent to its own delivery).
inline BoolMatrix node_temporal_adjacency(const Instance& inst, const AdjacencySpec& spec) {
    check_spec(spec);
    const int m = 2 * inst.n_customers();
    BoolMatrix a(m, std::vector<std::uint8_t>(m, 0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j && std::abs(inst.node_late(i) - inst.node_late(j)) <= spec.zeta) a[i][j] = 1;
    return a;
}

inline BoolMatrix node_spatial_adjacency(const Instance& inst, const AdjacencySpec& spec) {
    check_spec(spec);
    const int m = 2 * inst.n_customers();
    BoolMatrix a(m, std::vector<std::uint8_t>(m, 0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j && distance_km(inst.location(i), inst.location(j)) <= spec.mu) a[i][j] = 1;
    return a;
}

struct EdgeFeature {
    int i = 0;
    int j = 0;
    double value = 0.0;  // min
    Mode mode = Mode::UAV;
};

/// Relative-time edge weight |e_i - l_j - d_ij / v| in minutes, d_ij by shortest path.
inline double relative_time(const Instance& inst, const TravelTable& table, int i, int j, double speed_mps) {
    const double travel_min = table.distance_m(i, j) / speed_mps / 60.0;
    return std::abs(inst.node_early(i) - inst.node_late(j) - travel_min);
}

/// Edge features for every ordered node pair in the temporal neighbourhood; no-path pairs omitted.
inline std::vector<EdgeFeature> edge_features(const Instance& inst, const TravelTable& table, Mode mode,
                                              double speed_mps, const AdjacencySpec& spec) {
    if (!(speed_mps > 0)) throw ContractViolation("edge_features: speed must be positive");
    const auto adj = node_temporal_adjacency(inst, spec);
    std::vector<EdgeFeature> out;
    const int m = 2 * inst.n_customers();
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (adj[i][j] && table.reachable(i, j))
                out.push_back({i, j, relative_time(inst, table, i, j, speed_mps), mode});
    return out;
}

// ---------------------------------------------------------------------------
// Graph file (format_version 1)

inline nlohmann::json to_json(const DualNetwork& net) {
    nlohmann::json nodes = nlohmann::json::array();
    for (int v = 0; v < net.uav.n_nodes(); ++v) {
        const auto& n = net.uav.nodes()[v];
        nodes.push_back({{"index", v}, {"x_km", n.pos.x}, {"y_km", n.pos.y}, {"kind", std::string(to_string(n.kind))}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const ModeGraph* g : {&net.uav, &net.adr})
        for (const auto& e : g->edges())
            edges.push_back({{"i", e.from},
                             {"j", e.to},
                             {"length_m", e.length_m},
                             {"speed_cap", e.speed_cap == kInf ? nlohmann::json(nullptr) : nlohmann::json(e.speed_cap)},
                             {"allowed", e.allowed},
                             {"mode", std::string(to_string(g->mode()))}});
    return {{"format_version", 1}, {"nodes", nodes}, {"edges", edges}};
}

inline DualNetwork network_from_json(const nlohmann::json& doc) {
    using detail::require;
    detail::require_version(doc, "format_version", 1);
    DualNetwork net;
    const auto nodes = require<nlohmann::json>(doc, "nodes", "");
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        const std::string at = "nodes[" + std::to_string(v) + "]";
        if (require<int>(nodes[v], "index", at) != static_cast<int>(v))
            throw ParseError(at + ".index", "nodes must be listed in index order");
        GraphNode n;
        n.pos = {require<double>(nodes[v], "x_km", at), require<double>(nodes[v], "y_km", at)};
        try {
            n.kind = node_kind_from_string(require<std::string>(nodes[v], "kind", at));
        } catch (const std::invalid_argument& e) {
            throw ParseError(at + ".kind", e.what());
        }
        if (n.kind != NodeKind::Intermediary && v > 0 && net.uav.nodes().back().kind == NodeKind::Intermediary)
            throw ParseError(at + ".kind", "key nodes must precede intermediary nodes");
        net.uav.add_node(n);
        net.adr.add_node(n);
    }
    const auto edges = require<nlohmann::json>(doc, "edges", "");
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const std::string at = "edges[" + std::to_string(k) + "]";
        const auto& j = edges[k];
        Edge e;
        e.from = require<int>(j, "i", at);
        e.to = require<int>(j, "j", at);
        e.length_m = require<double>(j, "length_m", at);
        e.speed_cap = (j.contains("speed_cap") && !j.at("speed_cap").is_null()) ? require<double>(j, "speed_cap", at) : kInf;
        e.allowed = detail::optional_field<bool>(j, "allowed", at, true);
        Mode mode;
        try {
            mode = mode_from_string(require<std::string>(j, "mode", at));
        } catch (const std::invalid_argument& ex) {
            throw ParseError(at + ".mode", ex.what());
        }
        try {
            (mode == Mode::UAV ? net.uav : net.adr).add_edge(e);
        } catch (const ContractViolation& ex) {
            throw ParseError(at, ex.what());
        }
    }
    return net;
}

inline DualNetwork load_network(const std::string& path) { return network_from_json(detail::read_json_file(path)); }
inline void save_network(const DualNetwork& net, const std::string& path) { detail::write_json_file(path, to_json(net)); }

}  // namespace cpdptw
