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
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "fvqe/circuit.hpp"
#include "fvqe/common.hpp"
#include "fvqe/sampling.hpp"
#include "fvqe/statevector.hpp"

namespace fvqe {

/// One independently-realizable piece of a causal cone: a connected set of
/// retained qubits with its reduced circuit remapped onto width qubits().
/// The reduced circuit keeps the original parameter slots, so it simulates
/// with the full parameter vector of the parent circuit.
struct SubCone {
    std::vector<int> qubits;  // original qubit ids, ascending
    Circuit circuit;
    std::vector<int> slots;  // parameter slots appearing inside

    int width() const { return static_cast<int>(qubits.size()); }

    int local_index(int original_qubit) const {
        const auto it = std::lower_bound(qubits.begin(), qubits.end(), original_qubit);
        if (it == qubits.end() || *it != original_qubit) {
            throw ValidationError("qubit not in sub-cone");
        }
        return static_cast<int>(it - qubits.begin());
    }
};

/// Result of the backward light-cone sweep: the gates and qubits that can
/// affect an observable on the support, split into separable sub-cones.
struct CausalCone {
    std::vector<int> support;            // original observable support
    std::vector<int> qubits;             // all retained qubits, ascending
    std::vector<std::size_t> gate_indices;  // retained gate positions, ascending
    std::vector<SubCone> subcones;

    int total_width() const { return static_cast<int>(qubits.size()); }

    int max_subcone_width() const {
        int w = 0;
        for (const auto& s : subcones) w = std::max(w, s.width());
        return w;
    }

    std::vector<int> all_slots() const {
        std::vector<int> slots;
        for (const auto& s : subcones) slots.insert(slots.end(), s.slots.begin(), s.slots.end());
        std::sort(slots.begin(), slots.end());
        return slots;
    }
};

/// Backward sweep over the gate list: a gate is retained iff its qubits
/// intersect the active set, which then absorbs the gate's qubits. Gates
/// outside the cone cancel against their adjoints and are dropped. The
/// retained region is partitioned into connected components, each evaluable
/// as an independent circuit.
inline CausalCone causal_cone(const Circuit& circuit, std::vector<int> support) {
    if (support.empty()) throw ValidationError("causal cone needs a non-empty support");
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    for (int q : support) {
        if (q < 0 || q >= circuit.width) throw ValidationError("support qubit out of range");
    }

    std::vector<char> active(static_cast<std::size_t>(circuit.width), 0);
    for (int q : support) active[static_cast<std::size_t>(q)] = 1;

    std::vector<std::size_t> kept;
    for (std::size_t i = circuit.gates.size(); i-- > 0;) {
        const auto qs = circuit.gates[i].qubits();
        const bool hit = std::any_of(qs.begin(), qs.end(), [&](int q) {
            return active[static_cast<std::size_t>(q)] != 0;
        });
        if (!hit) continue;
        kept.push_back(i);
        for (int q : qs) active[static_cast<std::size_t>(q)] = 1;
    }
    std::reverse(kept.begin(), kept.end());

    CausalCone cone;
    cone.support = support;
    cone.gate_indices = kept;
    for (int q = 0; q < circuit.width; ++q) {
        if (active[static_cast<std::size_t>(q)]) cone.qubits.push_back(q);
    }

    // Union-find over retained qubits; gates join their qubits.
    std::vector<int> parent(static_cast<std::size_t>(circuit.width));
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int q) {
        while (parent[static_cast<std::size_t>(q)] != q) {
            parent[static_cast<std::size_t>(q)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(q)])];
            q = parent[static_cast<std::size_t>(q)];
        }
        return q;
    };
    for (std::size_t i : kept) {
        const auto qs = circuit.gates[i].qubits();
        for (std::size_t k = 1; k < qs.size(); ++k) {
            parent[static_cast<std::size_t>(find(qs[k]))] = find(qs[0]);
        }
    }

    std::map<int, std::vector<int>> components;
    for (int q : cone.qubits) components[find(q)].push_back(q);

    for (auto& [root, qubits] : components) {
        SubCone sub;
        sub.qubits = qubits;
        sub.circuit.width = static_cast<int>(qubits.size());
        sub.circuit.param_count = circuit.param_count;
        for (std::size_t i : kept) {
            const Gate& g = circuit.gates[i];
            const auto qs = g.qubits();
            if (find(qs[0]) != root) continue;
            Gate local = g;
            switch (local.kind) {
                case Gate::Kind::Rotation:
                    for (auto& [q, axis] : local.support) q = sub.local_index(q);
                    if (local.control >= 0) local.control = sub.local_index(local.control);
                    if (local.slot >= 0) sub.slots.push_back(local.slot);
                    break;
                case Gate::Kind::Cnot:
                    local.q0 = sub.local_index(local.q0);
                    local.q1 = sub.local_index(local.q1);
                    break;
                case Gate::Kind::Hadamard: local.q0 = sub.local_index(local.q0); break;
            }
            sub.circuit.gates.push_back(local);
        }
        std::sort(sub.slots.begin(), sub.slots.end());
        cone.subcones.push_back(std::move(sub));
    }
    return cone;
}

/// <prod Z over the support qubits of this sub-cone>, exact or sampled.
inline double subcone_zproduct(const SubCone& sub, std::span<const double> params,
                               const std::vector<int>& support, const Measurement& meas,
                               std::uint64_t stream = 0) {
    std::uint64_t mask = 0;
    for (int q : support) {
        const auto it = std::lower_bound(sub.qubits.begin(), sub.qubits.end(), q);
        if (it == sub.qubits.end() || *it != q) continue;
        mask |= 1ULL << (sub.circuit.width - 1 - sub.local_index(q));
    }
    if (mask == 0) return 1.0;
    const StateVector state = simulate(sub.circuit, params);
    if (meas.exact()) return zproduct_expectation(state, mask);
    const SampleSet samples = sample(state, meas.shots, derive_seed(meas.seed, stream));
    double sum = 0.0;
    for (const auto& [x, count] : samples.counts) {
        const double parity = (std::popcount(x & mask) & 1) ? -1.0 : 1.0;
        sum += parity * static_cast<double>(count);
    }
    return sum / static_cast<double>(samples.total);
}

/// Product observable over disjoint supports factorizes across separable
/// sub-cones, so the full expectation is the product of per-cone values.
inline double cone_zproduct(const CausalCone& cone, std::span<const double> params,
                            const Measurement& meas) {
    double product = 1.0;
    std::uint64_t stream = 0;
    for (const auto& sub : cone.subcones) {
        product *= subcone_zproduct(sub, params, cone.support, meas, stream++);
    }
    return product;
}

/// <coeff * prod_{q in support} Z_q>, either on the full state or via the
/// causal cone of the support. Both routes agree exactly in exact mode.
inline double expectation_zproduct_observable(const Circuit& circuit,
                                              std::span<const double> params,
                                              const std::vector<int>& support, double coeff,
                                              bool via_cone, const Measurement& meas) {
    if (via_cone) {
        const CausalCone cone = causal_cone(circuit, support);
        return coeff * cone_zproduct(cone, params, meas);
    }
    std::uint64_t mask = 0;
    for (int q : support) {
        if (q < 0 || q >= circuit.width) throw ValidationError("support qubit out of range");
        mask |= 1ULL << (circuit.width - 1 - q);
    }
    const StateVector state = simulate(circuit, params);
    if (meas.exact()) return coeff * zproduct_expectation(state, mask);
    const SampleSet samples = sample(state, meas.shots, meas.seed);
    double sum = 0.0;
    for (const auto& [x, count] : samples.counts) {
        const double parity = (std::popcount(x & mask) & 1) ? -1.0 : 1.0;
        sum += parity * static_cast<double>(count);
    }
    return coeff * sum / static_cast<double>(samples.total);
}

}  // namespace fvqe
