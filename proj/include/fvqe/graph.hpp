// Copyright 2026 The fvqe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "fvqe/common.hpp"

namespace fvqe {

/// Undirected weighted edge, 1-based endpoints with u < v.
struct WeightedEdge {
    int u = 0;
    int v = 0;
    double weight = 0.0;
};

/// A cut assignment: one entry per vertex, +1 or -1, with the last vertex
/// pinned to +1 to break the global flip symmetry.
using Cut = std::vector<int>;

/// Simple, connected, undirected graph with edge weights in [0, 1].
/// 3-regularity is a property of generated MaxCut instances (checked by the
/// generator and the instance loader), not of the type itself: fixtures for
/// other qubit counts may use arbitrary simple connected graphs.
class WeightedGraph {
  public:
    WeightedGraph(int num_vertices, std::vector<WeightedEdge> edges)
        : num_vertices_(num_vertices), edges_(std::move(edges)) {
        validate();
        std::sort(edges_.begin(), edges_.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
            return std::make_pair(a.u, a.v) < std::make_pair(b.u, b.v);
        });
    }

    int num_vertices() const { return num_vertices_; }
    int num_qubits() const { return num_vertices_ - 1; }
    const std::vector<WeightedEdge>& edges() const { return edges_; }

    double total_weight() const {
        double sum = 0.0;
        for (const auto& e : edges_) sum += e.weight;
        return sum;
    }

    std::vector<int> degrees() const {
        std::vector<int> deg(static_cast<std::size_t>(num_vertices_) + 1, 0);
        for (const auto& e : edges_) {
            ++deg[static_cast<std::size_t>(e.u)];
            ++deg[static_cast<std::size_t>(e.v)];
        }
        return deg;
    }

    bool is_three_regular() const {
        const auto deg = degrees();
        for (int v = 1; v <= num_vertices_; ++v) {
            if (deg[static_cast<std::size_t>(v)] != 3) return false;
        }
        return true;
    }

    /// Text format: first line "N M", then M lines "u v w".
    static WeightedGraph load(std::istream& in) {
        int n = 0, m = 0;
        if (!(in >> n >> m)) throw ValidationError("graph file: missing 'N M' header");
        std::vector<WeightedEdge> edges;
        edges.reserve(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            WeightedEdge e;
            if (!(in >> e.u >> e.v >> e.weight)) {
                throw ValidationError("graph file: truncated edge list");
            }
            edges.push_back(e);
        }
        return WeightedGraph(n, std::move(edges));
    }

    void save(std::ostream& out) const {
        out << num_vertices_ << ' ' << edges_.size() << '\n';
        for (const auto& e : edges_) {
            out << e.u << ' ' << e.v << ' ' << format_double(e.weight) << '\n';
        }
    }

  private:
    void validate() const {
        if (num_vertices_ < 2) throw ValidationError("graph needs at least 2 vertices");
        std::vector<std::pair<int, int>> seen;
        for (const auto& e : edges_) {
            if (e.u < 1 || e.v < 1 || e.u > num_vertices_ || e.v > num_vertices_) {
                throw ValidationError("edge endpoint out of range");
            }
            if (e.u >= e.v) throw ValidationError("edges must satisfy u < v (no self-loops)");
            if (e.weight < 0.0 || e.weight > 1.0) {
                throw ValidationError("edge weight outside [0, 1]");
            }
            seen.emplace_back(e.u, e.v);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
            throw ValidationError("duplicate edge");
        }
        if (!connected()) throw ValidationError("graph must be connected");
    }

    bool connected() const {
        if (edges_.empty()) return num_vertices_ <= 1;
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(num_vertices_) + 1);
        for (const auto& e : edges_) {
            adj[static_cast<std::size_t>(e.u)].push_back(e.v);
            adj[static_cast<std::size_t>(e.v)].push_back(e.u);
        }
        std::vector<char> visited(static_cast<std::size_t>(num_vertices_) + 1, 0);
        std::vector<int> stack{1};
        visited[1] = 1;
        int count = 0;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            ++count;
            for (int w : adj[static_cast<std::size_t>(v)]) {
                if (!visited[static_cast<std::size_t>(w)]) {
                    visited[static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
            }
        }
        return count == num_vertices_;
    }

    int num_vertices_;
    std::vector<WeightedEdge> edges_;
};

// ---------------------------------------------------------------------------
// Basis-state convention, used consistently everywhere:
//   * graph vertex u in 1..n maps to qubit u; qubit 1 occupies the MOST
//     significant bit of an n-bit basis index;
//   * bit value 1 means z_u = +1 (vertex u on the same side of the cut as
//     the pinned last vertex N), bit value 0 means z_u = -1.
// Under this mapping the all-ones index is the trivial cut (cost 0).
// ---------------------------------------------------------------------------

inline int basis_bit(std::uint64_t x, int qubit_1based, int n) {
    return static_cast<int>((x >> (n - qubit_1based)) & 1u);
}

inline Cut cut_from_basis(std::uint64_t x, int num_vertices) {
    const int n = num_vertices - 1;
    Cut z(static_cast<std::size_t>(num_vertices));
    for (int u = 1; u <= n; ++u) {
        z[static_cast<std::size_t>(u - 1)] = basis_bit(x, u, n) == 1 ? +1 : -1;
    }
    z[static_cast<std::size_t>(n)] = +1;
    return z;
}

inline std::uint64_t basis_from_cut(const Cut& z) {
    const int n = static_cast<int>(z.size()) - 1;
    std::uint64_t x = 0;
    for (int u = 1; u <= n; ++u) {
        if (z[static_cast<std::size_t>(u - 1)] == +1) x |= 1ULL << (n - u);
    }
    return x;
}

inline std::string basis_to_string(std::uint64_t x, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int u = 1; u <= n; ++u) {
        if (basis_bit(x, u, n)) s[static_cast<std::size_t>(u - 1)] = '1';
    }
    return s;
}

inline void validate_cut(const WeightedGraph& graph, const Cut& cut) {
    if (static_cast<int>(cut.size()) != graph.num_vertices()) {
        throw ValidationError("cut length must equal the number of vertices");
    }
    for (int z : cut) {
        if (z != 1 && z != -1) throw ValidationError("cut entries must be +1 or -1");
    }
    if (cut.back() != +1) throw ValidationError("last cut entry must be +1");
}

/// Sum of the weights of edges crossing the cut.
inline double cut_cost(const WeightedGraph& graph, const Cut& cut) {
    validate_cut(graph, cut);
    double cost = 0.0;
    for (const auto& e : graph.edges()) {
        const int zu = cut[static_cast<std::size_t>(e.u - 1)];
        const int zv = cut[static_cast<std::size_t>(e.v - 1)];
        cost += e.weight * (1 - zu * zv) * 0.5;
    }
    return cost;
}

/// Cut cost of the assignment encoded by basis index x (last vertex at +1).
inline double cut_cost_of_basis(const WeightedGraph& graph, std::uint64_t x) {
    const int n = graph.num_qubits();
    double cost = 0.0;
    for (const auto& e : graph.edges()) {
        const int zu = basis_bit(x, e.u, n) * 2 - 1;
        const int zv = e.v == graph.num_vertices() ? +1 : basis_bit(x, e.v, n) * 2 - 1;
        cost += e.weight * (1 - zu * zv) * 0.5;
    }
    return cost;
}

inline constexpr int kBruteForceMaxQubits = 26;

struct BruteForceResult {
    Cut cut;
    std::uint64_t basis = 0;
    double max_cost = 0.0;
};

/// Exhaustive maximum over all 2^n assignments with the last vertex pinned
/// to +1. Ties break toward the lowest basis index.
inline BruteForceResult brute_force_optimum(const WeightedGraph& graph) {
    const int n = graph.num_qubits();
    if (n > kBruteForceMaxQubits) {
        throw CapabilityError("brute force is limited to " +
                              std::to_string(kBruteForceMaxQubits) + " qubits");
    }
    BruteForceResult best;
    best.max_cost = -1.0;
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t x = 0; x < total; ++x) {
        const double cost = cut_cost_of_basis(graph, x);
        if (cost > best.max_cost) {
            best.max_cost = cost;
            best.basis = x;
        }
    }
    best.cut = cut_from_basis(best.basis, graph.num_vertices());
    return best;
}

/// Random 3-regular instance via the pairing model: three stubs per vertex,
/// random perfect matching, rejected on self-loops, multi-edges, or a
/// disconnected result. Weights are drawn uniformly from [0, 1] in canonical
/// edge order once the structure is accepted.
inline WeightedGraph generate_instance(int n_qubits, std::uint64_t seed) {
    const int num_vertices = n_qubits + 1;
    if (num_vertices < 4 || num_vertices % 2 != 0) {
        throw ValidationError("a 3-regular graph needs an even vertex count >= 4");
    }
    Rng rng(derive_seed(seed, 0x67656e65ULL));  // instance-generation stream
    for (int attempt = 0; attempt < 100000; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(3 * num_vertices));
        for (int v = 1; v <= num_vertices; ++v) {
            stubs.push_back(v);
            stubs.push_back(v);
            stubs.push_back(v);
        }
        rng.shuffle(stubs);
        std::vector<std::pair<int, int>> pairs;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) {
                ok = false;
                break;
            }
            if (u > v) std::swap(u, v);
            pairs.emplace_back(u, v);
        }
        if (!ok) continue;
        std::sort(pairs.begin(), pairs.end());
        if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) continue;

        std::vector<WeightedEdge> edges;
        edges.reserve(pairs.size());
        for (const auto& [u, v] : pairs) edges.push_back({u, v, 0.0});
        for (auto& e : edges) e.weight = rng.uniform();
        try {
            return WeightedGraph(num_vertices, std::move(edges));
        } catch (const ValidationError&) {
            continue;  // disconnected draw, resample
        }
    }
    throw CapabilityError("3-regular generation did not converge");
}

}  // namespace fvqe
