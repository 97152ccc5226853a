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

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

#include "fvqe/circuit.hpp"
#include "fvqe/common.hpp"
#include "fvqe/filters.hpp"
#include "fvqe/statevector.hpp"

namespace fvqe {

/// Overlap-test circuit W(theta, phi) on n+1 qubits (ancilla appended as
/// qubit n): ancilla Hadamard, then the ansatz with every slotted rotation
/// R(theta_j) followed by the ancilla-controlled R(theta'_j) with
/// theta' = phi - theta, then a final ancilla Hadamard. It acts as
///   W|0>|0...0> = 1/2 |0>(psi(theta) + psi(phi)) + 1/2 |1>(psi(theta) - psi(phi)),
/// so <Z_anc x F> on the prepared state equals Re<psi(phi)|F|psi(theta)>.
inline Circuit build_overlap_test_circuit(const Circuit& ansatz, std::span<const double> theta,
                                          std::span<const double> phi) {
    if (static_cast<int>(theta.size()) != ansatz.param_count ||
        static_cast<int>(phi.size()) != ansatz.param_count) {
        throw ValidationError("parameter vector length mismatch");
    }
    const int ancilla = ansatz.width;
    Circuit w;
    w.width = ansatz.width + 1;
    w.param_count = 0;
    w.gates.push_back(Gate::hadamard(ancilla));
    for (const Gate& g : ansatz.gates) {
        if (g.kind == Gate::Kind::Rotation && g.slot >= 0) {
            if (g.support.size() != 1) {
                throw ValidationError("overlap test expects single-qubit slotted rotations");
            }
            const auto [qubit, axis] = g.support.front();
            const double base = theta[static_cast<std::size_t>(g.slot)];
            const double delta = phi[static_cast<std::size_t>(g.slot)] - base;
            w.gates.push_back(Gate::rotation_fixed({{qubit, axis}}, base));
            w.gates.push_back(Gate::controlled_rotation_fixed(ancilla, qubit, axis, delta));
        } else {
            w.gates.push_back(g);
        }
    }
    w.gates.push_back(Gate::hadamard(ancilla));
    return w;
}

/// <Z_anc x F~> with the provided shifted filter; internal building block
/// that lets a caller share one scale across many overlap evaluations.
inline double shifted_overlap_expectation(const Circuit& overlap_circuit,
                                          const DiagonalHamiltonian& h, const ScaledFilter& filter,
                                          const Measurement& meas) {
    const StateVector state = simulate(overlap_circuit, {});
    if (meas.exact()) {
        double sum = 0.0;
        const auto& amp = state.amplitudes();
        for (std::uint64_t i = 0; i < amp.size(); ++i) {
            const double p = std::norm(amp[i]);
            if (p == 0.0) continue;
            const double sign = (i & 1) ? -1.0 : 1.0;  // ancilla is the LSB
            sum += sign * p * filter.value(h.energy(i >> 1));
        }
        return sum;
    }
    const SampleSet samples = sample(state, meas.shots, meas.seed);
    double sum = 0.0;
    for (const auto& [i, count] : samples.counts) {
        const double sign = (i & 1) ? -1.0 : 1.0;
        sum += sign * static_cast<double>(count) * filter.value(h.energy(i >> 1));
    }
    return sum / static_cast<double>(samples.total);
}

/// Re<psi(phi)| F |psi(theta)> via the Hadamard test. Exact mode evaluates
/// the expectation from the full (n+1)-qubit state; otherwise it is sampled.
inline double hadamard_test_overlap(std::span<const double> theta, std::span<const double> phi,
                                    const Circuit& ansatz, const DiagonalHamiltonian& h,
                                    const FilterSpec& spec, const Measurement& meas) {
    const Circuit w = build_overlap_test_circuit(ansatz, theta, phi);
    const StateVector state = simulate(w, {});

    // Stabilizing shift from the register marginal of the prepared state.
    double shift = -std::numeric_limits<double>::infinity();
    const auto& amp = state.amplitudes();
    std::vector<double> marginal(amp.size() >> 1, 0.0);
    for (std::uint64_t i = 0; i < amp.size(); ++i) marginal[i >> 1] += std::norm(amp[i]);
    shift = support_max_log_filter(marginal, h, spec);
    if (shift == -std::numeric_limits<double>::infinity()) return 0.0;

    const ScaledFilter filter(spec, shift);
    return std::exp(shift) * shifted_overlap_expectation(w, h, filter, meas);
}

}  // namespace fvqe
