#pragma once

// Inference-only heterogeneous graph-attention encoder and cooperative decoder. Plugs into
// rollout as a Scorer. Nothing here is trained; weights are loaded or drawn at random.

#include <array>
#include <cstring>
#include <fstream>
#include <map>
#include <random>

#include "cpdptw/env.hpp"

namespace cpdptw {

inline constexpr int kEmbed = 128;
inline constexpr int kEdgeEmbed = 16;
inline constexpr int kHeads = 8;
inline constexpr int kHeadDim = kEmbed / kHeads;
inline constexpr int kLayers = 4;
inline constexpr int kNodeFeatures = 5;   // x, y, e, l, q
inline constexpr int kVehicleFeatures = 4;  // clock, load, battery, mode
inline constexpr double kClip = 10.0;
inline constexpr double kLeakySlope = 0.2;

struct Tensor {
    std::vector<int> dims;
    std::vector<double> data;

    std::size_t size() const {
        std::size_t s = 1;
        for (int d : dims) s *= static_cast<std::size_t>(d);
        return s;
    }
};

struct TensorShape {
    std::string name;
    std::vector<int> dims;
    int fan_in = 1;
    enum class Init { Uniform, Zero, One } init = Init::Uniform;
};

/// Every tensor of the model with its declared shape, in file order.
inline std::vector<TensorShape> weight_shapes() {
    using I = TensorShape::Init;
    const int att_in = 2 * kEmbed + 2 * kEdgeEmbed;
    std::vector<TensorShape> s{
        {"enc.in_mean", {kNodeFeatures}, 1, I::Zero},
        {"enc.in_var", {kNodeFeatures}, 1, I::One},
        {"enc.W1", {kEmbed, 2 * kNodeFeatures}, 2 * kNodeFeatures},
        {"enc.b1", {kEmbed}, 2 * kNodeFeatures},
        {"enc.W2", {kEmbed, kNodeFeatures}, kNodeFeatures},
        {"enc.b2", {kEmbed}, kNodeFeatures},
        {"enc.W3", {kEdgeEmbed, 1}, 1},
        {"enc.b3", {kEdgeEmbed}, 1},
        {"enc.W4", {kEdgeEmbed, 1}, 1},
        {"enc.b4", {kEdgeEmbed}, 1},
        {"enc.bn0.mean", {kEmbed}, 1, I::Zero},
        {"enc.bn0.var", {kEmbed}, 1, I::One},
    };
    for (int l = 0; l < kLayers; ++l) {
        const std::string p = "gat" + std::to_string(l) + ".";
        s.push_back({p + "W1", {kHeads, kHeadDim, att_in}, att_in});
        s.push_back({p + "g1", {kHeads, kHeadDim}, kHeadDim});
        s.push_back({p + "W2", {kHeads, kHeadDim, att_in}, att_in});
        s.push_back({p + "g2", {kHeads, kHeadDim}, kHeadDim});
        s.push_back({p + "WV", {kHeads, kHeadDim, kEmbed}, kEmbed});
        s.push_back({p + "W3", {kHeads, kEmbed, kHeadDim}, kHeadDim * kHeads});
        s.push_back({p + "W5", {kEmbed, kEmbed}, kEmbed});
        s.push_back({p + "b2", {kEmbed}, kEmbed});
        s.push_back({p + "bn1.mean", {kEmbed}, 1, I::Zero});
        s.push_back({p + "bn1.var", {kEmbed}, 1, I::One});
        s.push_back({p + "bn2.mean", {kEmbed}, 1, I::Zero});
        s.push_back({p + "bn2.var", {kEmbed}, 1, I::One});
    }
    for (auto [name, in] : std::initializer_list<std::pair<const char*, int>>{
             {"dec.Wv", kVehicleFeatures}, {"dec.W5", kEmbed + kVehicleFeatures}, {"dec.W6", kEmbed},
             {"dec.W7", kEmbed}, {"dec.WV", kEmbed}, {"dec.W8", kEmbed}, {"dec.W9", kEmbed}})
        s.push_back({name, {kEmbed, in}, in});
    return s;
}

class WeightSet {
public:
    const Tensor& operator[](const std::string& name) const {
        auto it = tensors_.find(name);
        if (it == tensors_.end()) throw ContractViolation("weights: missing tensor '" + name + "'");
        return it->second;
    }
    Tensor& at(const std::string& name) {
        auto it = tensors_.find(name);
        if (it == tensors_.end()) throw ContractViolation("weights: missing tensor '" + name + "'");
        return it->second;
    }
    void set(const std::string& name, Tensor t) { tensors_[name] = std::move(t); }
    const std::map<std::string, Tensor>& tensors() const { return tensors_; }

    /// Shapes match the declared table, entries are finite, variances positive.
    void check() const {
        for (const auto& sh : weight_shapes()) {
            const Tensor& t = (*this)[sh.name];
            if (t.dims != sh.dims) throw ContractViolation("weights: tensor '" + sh.name + "' has wrong shape");
            if (t.data.size() != t.size()) throw ContractViolation("weights: tensor '" + sh.name + "' has wrong size");
            for (double v : t.data)
                if (!std::isfinite(v)) throw ContractViolation("weights: tensor '" + sh.name + "' is not finite");
            if (sh.name.ends_with("var"))
                for (double v : t.data)
                    if (!(v > 0)) throw ContractViolation("weights: tensor '" + sh.name + "' must be positive");
        }
        if (tensors_.size() != weight_shapes().size()) throw ContractViolation("weights: unexpected extra tensors");
    }

    friend bool operator==(const WeightSet& a, const WeightSet& b) {
        if (a.tensors_.size() != b.tensors_.size()) return false;
        for (const auto& [k, t] : a.tensors_) {
            auto it = b.tensors_.find(k);
            if (it == b.tensors_.end() || it->second.dims != t.dims || it->second.data != t.data) return false;
        }
        return true;
    }

private:
    std::map<std::string, Tensor> tensors_;
};

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]; normalisation statistics start as identity.
inline WeightSet random_weights(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    WeightSet w;
    for (const auto& sh : weight_shapes()) {
        Tensor t{sh.dims, {}};
        t.data.resize(t.size());
        const double a = 1.0 / std::sqrt(static_cast<double>(sh.fan_in));
        std::uniform_real_distribution<double> u(-a, a);
        for (double& v : t.data)
            v = sh.init == TensorShape::Init::Zero ? 0.0 : sh.init == TensorShape::Init::One ? 1.0 : u(rng);
        w.set(sh.name, std::move(t));
    }
    return w;
}

inline WeightSet zero_weights() {
    WeightSet w = random_weights(0);
    for (const auto& sh : weight_shapes())
        if (sh.init == TensorShape::Init::Uniform) std::fill(w.at(sh.name).data.begin(), w.at(sh.name).data.end(), 0.0);
    return w;
}

// Binary layout: "CPDPTWW1", u32 version, u32 count, then per tensor
// u32 name length, name, u32 rank, u32 dims[rank], f64 data (row-major, little endian).
inline constexpr char kWeightMagic[8] = {'C', 'P', 'D', 'P', 'T', 'W', 'W', '1'};
inline constexpr std::uint32_t kWeightVersion = 1;

inline void save_weights(const WeightSet& w, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    out.write(kWeightMagic, 8);
    put32(kWeightVersion);
    put32(static_cast<std::uint32_t>(w.tensors().size()));
    for (const auto& [name, t] : w.tensors()) {
        put32(static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put32(static_cast<std::uint32_t>(t.dims.size()));
        for (int d : t.dims) put32(static_cast<std::uint32_t>(d));
        out.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double)));
    }
}

inline WeightSet load_weights(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    auto get32 = [&](const std::string& what) {
        std::uint32_t v = 0;
        if (!in.read(reinterpret_cast<char*>(&v), 4)) throw ParseError(path, "truncated at " + what);
        return v;
    };
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kWeightMagic, 8) != 0) throw ParseError(path, "not a weight file");
    if (const auto v = get32("version"); v != kWeightVersion)
        throw ParseError(path, "unsupported weight file version " + std::to_string(v));
    const auto count = get32("tensor count");
    WeightSet w;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto len = get32("name length");
        if (len > 256) throw ParseError(path, "corrupt tensor name");
        std::string name(len, '\0');
        if (!in.read(name.data(), len)) throw ParseError(path, "truncated tensor name");
        const auto rank = get32(name + " rank");
        if (rank > 4) throw ParseError(name, "rank too large");
        Tensor t;
        for (std::uint32_t r = 0; r < rank; ++r) t.dims.push_back(static_cast<int>(get32(name + " dims")));
        t.data.resize(t.size());
        if (!in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(double))))
            throw ParseError(name, "truncated tensor data");
        w.set(name, std::move(t));
    }
    for (const auto& sh : weight_shapes()) {
        if (!w.tensors().contains(sh.name)) throw ParseError(sh.name, "tensor missing from weight file");
        if (w[sh.name].dims != sh.dims) throw ParseError(sh.name, "shape does not match the declared table");
    }
    w.check();
    return w;
}

// ---------------------------------------------------------------------------
// Graph input

enum class NodeRole : std::uint8_t { Pickup, Delivery, Depot };

struct PolicyGraph {
    int n_customers = 0;
    std::vector<std::array<double, kNodeFeatures>> features;  // per node
    std::vector<NodeRole> roles;
    std::vector<std::vector<int>> neighbors;  // temporal u spatial, customer nodes only
    std::vector<double> uav_edge, adr_edge;   // dense n x n relative times (scaled)

    int n_nodes() const { return static_cast<int>(features.size()); }
    double edge(const std::vector<double>& m, int i, int j) const { return m[static_cast<std::size_t>(i) * n_nodes() + j]; }
};

/// Features are [x, y, e, l, q] scaled by the area side, the latest due time and the largest demand.
inline PolicyGraph make_policy_graph(const Simulator& sim, const AdjacencySpec& spec = {}) {
    const Instance& inst = sim.instance();
    PolicyGraph g;
    g.n_customers = inst.n_customers();
    const int n = inst.n_nodes();
    double horizon = 1.0, qmax = 1.0;
    for (const auto& c : inst.customers) {
        horizon = std::max(horizon, c.late);
        qmax = std::max(qmax, c.demand);
    }
    for (int v = 0; v < n; ++v) {
        const Point p = inst.location(v);
        const bool dep = inst.is_depot(v);
        g.features.push_back({p.x / inst.area_km, p.y / inst.area_km, dep ? 0.0 : inst.node_early(v) / horizon,
                              dep ? 0.0 : inst.node_late(v) / horizon, inst.node_demand(v) / qmax});
        g.roles.push_back(inst.is_pickup(v) ? NodeRole::Pickup : inst.is_delivery(v) ? NodeRole::Delivery : NodeRole::Depot);
    }
    const auto at = node_temporal_adjacency(inst, spec);
    const auto as = node_spatial_adjacency(inst, spec);
    g.neighbors.resize(n);
    for (int i = 0; i < 2 * g.n_customers; ++i)
        for (int j = 0; j < 2 * g.n_customers; ++j)
            if (at[i][j] || as[i][j]) g.neighbors[i].push_back(j);
    double uav_speed = 0.0, adr_speed = 0.0;
    for (const auto& v : sim.fleet().vehicles) {
        double& sp = v.mode == Mode::UAV ? uav_speed : adr_speed;
        sp = std::max(sp, v.max_speed);
    }
    g.uav_edge.assign(static_cast<std::size_t>(n) * n, 0.0);
    g.adr_edge = g.uav_edge;
    for (int i = 0; i < 2 * g.n_customers; ++i)
        for (int j = 0; j < 2 * g.n_customers; ++j) {
            if (i == j) continue;
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            if (uav_speed > 0 && sim.table(Mode::UAV).reachable(i, j))
                g.uav_edge[idx] = relative_time(inst, sim.table(Mode::UAV), i, j, uav_speed) / horizon;
            if (adr_speed > 0 && sim.table(Mode::ADR).reachable(i, j))
                g.adr_edge[idx] = relative_time(inst, sim.table(Mode::ADR), i, j, adr_speed) / horizon;
        }
    return g;
}

// ---------------------------------------------------------------------------
// Dense helpers

namespace detail {

using Vec = std::vector<double>;

/// y = M x for a row-major (rows x cols) block starting at `m`.
inline void matvec(const double* m, int rows, int cols, const double* x, double* y, bool accumulate = false) {
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        const double* row = m + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) s += row[c] * x[c];
        y[r] = accumulate ? y[r] + s : s;
    }
}

inline void standardize(double* x, const Tensor& mean, const Tensor& var, int n) {
    for (int i = 0; i < n; ++i) x[i] = (x[i] - mean.data[i]) / std::sqrt(var.data[i]);
}

inline double dot(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

/// Numerically stable softmax in place.
inline void softmax(std::vector<double>& v) {
    if (v.empty()) return;
    const double mx = *std::max_element(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : v) sum += (x = std::exp(x - mx));
    for (double& x : v) x /= sum;
}

inline double leaky_relu(double x) { return x >= 0 ? x : kLeakySlope * x; }

}  // namespace detail

/// Node vectors h_i (row-major n x 128) and the mean-pooled graph summary.
struct Embedding {
    int n = 0;
    std::vector<double> h;
    std::vector<double> mean;

    const double* row(int i) const { return h.data() + static_cast<std::size_t>(i) * kEmbed; }
    double* row(int i) { return h.data() + static_cast<std::size_t>(i) * kEmbed; }
    void update_mean() {
        mean.assign(kEmbed, 0.0);
        for (int i = 0; i < n; ++i)
            for (int d = 0; d < kEmbed; ++d) mean[d] += h[static_cast<std::size_t>(i) * kEmbed + d];
        for (double& v : mean) v /= n;
    }
};

/// 32-dim edge embeddings [UAV 16 ; ADR 16] per ordered node pair (dense n x n).
struct EdgeEmbedding {
    int n = 0;
    std::vector<double> e;
    const double* at(int i, int j) const { return e.data() + (static_cast<std::size_t>(i) * n + j) * 2 * kEdgeEmbed; }
};

inline std::pair<Embedding, EdgeEmbedding> init_embeddings(const PolicyGraph& g, const WeightSet& w) {
    const int n = g.n_nodes();
    const int N = g.n_customers;
    Embedding emb;
    emb.n = n;
    emb.h.assign(static_cast<std::size_t>(n) * kEmbed, 0.0);
    std::vector<std::array<double, kNodeFeatures>> x = g.features;
    for (auto& f : x) detail::standardize(f.data(), w["enc.in_mean"], w["enc.in_var"], kNodeFeatures);
    for (int i = 0; i < n; ++i) {
        double* out = emb.row(i);
        if (g.roles[i] == NodeRole::Pickup) {
            double cat[2 * kNodeFeatures];
            std::copy(x[i].begin(), x[i].end(), cat);
            std::copy(x[i + N].begin(), x[i + N].end(), cat + kNodeFeatures);
            detail::matvec(w["enc.W1"].data.data(), kEmbed, 2 * kNodeFeatures, cat, out);
            for (int d = 0; d < kEmbed; ++d) out[d] += w["enc.b1"].data[d];
        } else {
            std::array<double, kNodeFeatures> in = x[i];
            if (g.roles[i] == NodeRole::Depot) in.fill(0.0);
            detail::matvec(w["enc.W2"].data.data(), kEmbed, kNodeFeatures, in.data(), out);
            for (int d = 0; d < kEmbed; ++d) out[d] += w["enc.b2"].data[d];
        }
        detail::standardize(out, w["enc.bn0.mean"], w["enc.bn0.var"], kEmbed);
    }
    emb.update_mean();
    EdgeEmbedding ee;
    ee.n = n;
    ee.e.assign(static_cast<std::size_t>(n) * n * 2 * kEdgeEmbed, 0.0);
    const auto& W3 = w["enc.W3"].data;
    const auto& b3 = w["enc.b3"].data;
    const auto& W4 = w["enc.W4"].data;
    const auto& b4 = w["enc.b4"].data;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double* out = ee.e.data() + (static_cast<std::size_t>(i) * n + j) * 2 * kEdgeEmbed;
            const double fu = g.edge(g.uav_edge, i, j), fa = g.edge(g.adr_edge, i, j);
            for (int d = 0; d < kEdgeEmbed; ++d) {
                out[d] = W3[d] * fu + b3[d];
                out[kEdgeEmbed + d] = W4[d] * fa + b4[d];
            }
        }
    return {std::move(emb), std::move(ee)};
}

/// Attention weights of one layer: [node][head][group] over that group's neighbours.
/// Groups are 0 = full neighbourhood, 1 = pickup neighbours, 2 = delivery neighbours.
struct LayerTrace {
    std::vector<std::array<std::array<std::vector<double>, 3>, kHeads>> weights;
    std::vector<std::array<std::vector<int>, 3>> groups;
};

/// One heterogeneous attention layer. Pickup nodes score neighbours with (g1, W1), all other
/// nodes with (g2, W2); each of the three neighbour groups has its own softmax and the three
/// aggregates are summed. Heads are projected back to 128, then residual, normalisation,
/// feed-forward, residual, normalisation. An empty neighbourhood falls back to a self-loop.
inline Embedding gat_layer(const Embedding& h, const PolicyGraph& g, const EdgeEmbedding& ee, const WeightSet& w, int layer,
                           LayerTrace* trace = nullptr) {
    if (layer < 0 || layer >= kLayers) throw ContractViolation("gat_layer: layer index out of range");
    if (h.n != g.n_nodes() || ee.n != g.n_nodes()) throw ContractViolation("gat_layer: shape mismatch");
    const int n = h.n;
    const std::string p = "gat" + std::to_string(layer) + ".";
    const Tensor* Wr[2] = {&w[p + "W1"], &w[p + "W2"]};
    const Tensor* gr[2] = {&w[p + "g1"], &w[p + "g2"]};
    const auto& WV = w[p + "WV"].data;
    const auto& W3 = w[p + "W3"].data;
    const int att_in = 2 * kEmbed + 2 * kEdgeEmbed;

    // h_i and h_j blocks of each role's attention matrix, applied to every node once
    std::vector<double> proj(static_cast<std::size_t>(2) * 2 * kHeads * n * kHeadDim);
    auto proj_at = [&](int role, int block, int head, int i) {
        return proj.data() + ((((static_cast<std::size_t>(role) * 2 + block) * kHeads + head) * n) + i) * kHeadDim;
    };
    for (int role = 0; role < 2; ++role)
        for (int block = 0; block < 2; ++block)
            for (int k = 0; k < kHeads; ++k) {
                const double* m = Wr[role]->data.data() + static_cast<std::size_t>(k) * kHeadDim * att_in;
                for (int i = 0; i < n; ++i) {
                    double* o = proj_at(role, block, k, i);
                    for (int r = 0; r < kHeadDim; ++r) o[r] = detail::dot(m + r * att_in + block * kEmbed, h.row(i), kEmbed);
                }
            }
    std::vector<double> values(static_cast<std::size_t>(n) * kHeads * kHeadDim);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < kHeads; ++k)
            detail::matvec(WV.data() + static_cast<std::size_t>(k) * kHeadDim * kEmbed, kHeadDim, kEmbed, h.row(j),
                           values.data() + (static_cast<std::size_t>(j) * kHeads + k) * kHeadDim);

    if (trace) {
        trace->weights.assign(n, {});
        trace->groups.assign(n, {});
    }
    Embedding out;
    out.n = n;
    out.h.assign(static_cast<std::size_t>(n) * kEmbed, 0.0);
    for (int i = 0; i < n; ++i) {
        const int role = g.roles[i] == NodeRole::Pickup ? 0 : 1;
        std::array<std::vector<int>, 3> groups;
        groups[0] = g.neighbors[i].empty() ? std::vector<int>{i} : g.neighbors[i];
        for (int j : groups[0]) {
            if (g.roles[j] == NodeRole::Pickup) groups[1].push_back(j);
            if (g.roles[j] == NodeRole::Delivery) groups[2].push_back(j);
        }
        double* oi = out.row(i);
        for (int k = 0; k < kHeads; ++k) {
            const double* a_i = proj_at(role, 0, k, i);
            const double* gk = gr[role]->data.data() + static_cast<std::size_t>(k) * kHeadDim;
            const double* m = Wr[role]->data.data() + static_cast<std::size_t>(k) * kHeadDim * att_in;
            std::map<int, double> raw;
            for (int j : groups[0]) {
                const double* b_j = proj_at(role, 1, k, j);
                const double* e = ee.at(i, j);
                double s = 0.0;
                for (int r = 0; r < kHeadDim; ++r)
                    s += gk[r] * (a_i[r] + b_j[r] + detail::dot(m + r * att_in + 2 * kEmbed, e, 2 * kEdgeEmbed));
                raw[j] = detail::leaky_relu(s);
            }
            std::array<double, kHeadDim> agg{};
            for (int grp = 0; grp < 3; ++grp) {
                const auto& nb = groups[grp];
                if (nb.empty()) continue;
                std::vector<double> sc(nb.size());
                for (std::size_t t = 0; t < nb.size(); ++t) sc[t] = raw[nb[t]];
                detail::softmax(sc);
                for (std::size_t t = 0; t < nb.size(); ++t) {
                    const double* v = values.data() + (static_cast<std::size_t>(nb[t]) * kHeads + k) * kHeadDim;
                    for (int r = 0; r < kHeadDim; ++r) agg[r] += sc[t] * v[r];
                }
                if (trace) trace->weights[i][k][grp] = std::move(sc);
            }
            detail::matvec(W3.data() + static_cast<std::size_t>(k) * kEmbed * kHeadDim, kEmbed, kHeadDim, agg.data(), oi, true);
        }
        if (trace) trace->groups[i] = groups;
        // residual + normalisation, then feed-forward block
        for (int d = 0; d < kEmbed; ++d) oi[d] += h.row(i)[d];
        detail::standardize(oi, w[p + "bn1.mean"], w[p + "bn1.var"], kEmbed);
        std::array<double, kEmbed> ff{};
        detail::matvec(w[p + "W5"].data.data(), kEmbed, kEmbed, oi, ff.data());
        const auto& b2 = w[p + "b2"].data;
        for (int d = 0; d < kEmbed; ++d) oi[d] += std::max(ff[d] + b2[d], 0.0);
        detail::standardize(oi, w[p + "bn2.mean"], w[p + "bn2.var"], kEmbed);
    }
    out.update_mean();
    return out;
}

inline Embedding encode(const PolicyGraph& g, const WeightSet& w) {
    auto [h, ee] = init_embeddings(g, w);
    for (int l = 0; l < kLayers; ++l) h = gat_layer(h, g, ee, w, l);
    return h;
}

using VehicleFeatures = std::array<double, kVehicleFeatures>;

inline VehicleFeatures vehicle_features(const VehicleSpec& spec, const VehicleState& vs) {
    return {vs.clock / 60.0, vs.load / spec.capacity, vs.battery / spec.battery, spec.mode == Mode::UAV ? 1.0 : 0.0};
}

/// Probability for every (vehicle, node) pair; masked pairs are exactly 0 and the open pairs
/// sum to 1. Throws when every pair is masked.
inline ScoreMatrix decode_scores(const Embedding& h, const std::vector<VehicleFeatures>& vehicles, const ActionMask& mask,
                                 const WeightSet& w) {
    const int K = static_cast<int>(vehicles.size());
    if (mask.n_vehicles() != K || mask.n_nodes() != h.n) throw ContractViolation("decode_scores: shape mismatch");
    if (!mask.any()) throw ContractViolation("decode_scores: every pair is masked (terminal state)");
    const double scale = 1.0 / std::sqrt(static_cast<double>(kEmbed));
    // fleet summary: graph mean and mean vehicle features
    std::array<double, kEmbed + kVehicleFeatures> summary{};
    std::copy(h.mean.begin(), h.mean.end(), summary.begin());
    for (const auto& v : vehicles)
        for (int d = 0; d < kVehicleFeatures; ++d) summary[kEmbed + d] += v[d] / K;
    std::array<double, kEmbed> shared{};
    detail::matvec(w["dec.W5"].data.data(), kEmbed, kEmbed + kVehicleFeatures, summary.data(), shared.data());

    std::vector<double> keys(static_cast<std::size_t>(h.n) * kEmbed), vals(keys.size()), comp(keys.size());
    for (int i = 0; i < h.n; ++i) {
        detail::matvec(w["dec.W7"].data.data(), kEmbed, kEmbed, h.row(i), keys.data() + static_cast<std::size_t>(i) * kEmbed);
        detail::matvec(w["dec.WV"].data.data(), kEmbed, kEmbed, h.row(i), vals.data() + static_cast<std::size_t>(i) * kEmbed);
        detail::matvec(w["dec.W9"].data.data(), kEmbed, kEmbed, h.row(i), comp.data() + static_cast<std::size_t>(i) * kEmbed);
    }
    ScoreMatrix logits(K, std::vector<double>(h.n, 0.0));
    for (int k = 0; k < K; ++k) {
        std::array<double, kEmbed> ctx{}, query{}, hv{}, q2{};
        detail::matvec(w["dec.Wv"].data.data(), kEmbed, kVehicleFeatures, vehicles[k].data(), ctx.data());
        for (int d = 0; d < kEmbed; ++d) ctx[d] += shared[d];
        detail::matvec(w["dec.W6"].data.data(), kEmbed, kEmbed, ctx.data(), query.data());
        std::vector<double> u(h.n);
        for (int i = 0; i < h.n; ++i) u[i] = scale * detail::dot(query.data(), keys.data() + static_cast<std::size_t>(i) * kEmbed, kEmbed);
        detail::softmax(u);
        for (int i = 0; i < h.n; ++i)
            for (int d = 0; d < kEmbed; ++d) hv[d] += u[i] * vals[static_cast<std::size_t>(i) * kEmbed + d];
        detail::matvec(w["dec.W8"].data.data(), kEmbed, kEmbed, hv.data(), q2.data());
        for (int i = 0; i < h.n; ++i)
            logits[k][i] = kClip * std::tanh(scale * detail::dot(q2.data(), comp.data() + static_cast<std::size_t>(i) * kEmbed, kEmbed));
    }
    double mx = -kInf;
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < h.n; ++i)
            if (mask(k, i)) mx = std::max(mx, logits[k][i]);
    double sum = 0.0;
    ScoreMatrix prob(K, std::vector<double>(h.n, 0.0));
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < h.n; ++i)
            if (mask(k, i)) sum += (prob[k][i] = std::exp(logits[k][i] - mx));
    for (auto& row : prob)
        for (double& p : row) p /= sum;
    return prob;
}

/// Scorer backed by the attention model. The graph is encoded once per instance and reused at
/// every decoding step.
class AttentionScorer {
public:
    explicit AttentionScorer(WeightSet w, AdjacencySpec spec = {})
        : state_(std::make_shared<State>()) {
        w.check();
        state_->w = std::move(w);
        state_->spec = spec;
    }

    ScoreMatrix operator()(const Simulator& sim, const SimState& s, const ActionMask& mask) const {
        State& st = *state_;
        const auto token = sim.token();
        const bool cached = !st.encoded_for.expired() && !st.encoded_for.owner_before(token) &&
                            !token.owner_before(st.encoded_for);
        if (!cached) {
            st.h = encode(make_policy_graph(sim, st.spec), st.w);
            st.encoded_for = token;
        }
        std::vector<VehicleFeatures> vf;
        for (int k = 0; k < sim.n_vehicles(); ++k) vf.push_back(vehicle_features(sim.vehicle(k), s.vehicles[k]));
        return decode_scores(st.h, vf, mask, st.w);
    }

private:
    struct State {
        WeightSet w;
        AdjacencySpec spec;
        Embedding h;
        std::weak_ptr<const void> encoded_for;
    };
    std::shared_ptr<State> state_;
};

}  // namespace cpdptw
