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
#include <numbers>
#include <span>
#include <vector>

#include "fvqe/circuit.hpp"
#include "fvqe/common.hpp"
#include "fvqe/filters.hpp"
#include "fvqe/hamiltonian.hpp"
#include "fvqe/statevector.hpp"

namespace fvqe {

/// Hardware-efficient ansatz: per layer, an R_y rotation on every qubit
/// followed by a brickwork row of CNOTs (pairs (0,1),(2,3),... on odd
/// layers, (1,2),(3,4),... on even layers), and a final R_y row after the
/// last layer. m = n(p+1) parameters, each in exactly one rotation.
///
/// The reduced variant keeps only the first and last rotation row per qubit
/// (m = 2n) and every entangling row; at p = 1 it coincides with the full
/// layout.
struct HardwareEfficientAnsatz {
    Circuit circuit;
    int qubits = 0;
    int layers = 0;
    bool reduced = false;
    std::vector<int> final_rotation_slots;
};

inline HardwareEfficientAnsatz build_hea(int n, int p, bool reduced_rotations = false) {
    if (n < 2) throw ValidationError("ansatz needs at least 2 qubits");
    if (p < 1) throw ValidationError("ansatz needs at least 1 layer");
    HardwareEfficientAnsatz ansatz;
    ansatz.qubits = n;
    ansatz.layers = p;
    ansatz.reduced = reduced_rotations;
    Circuit& c = ansatz.circuit;
    c.width = n;
    int slot = 0;
    for (int layer = 1; layer <= p; ++layer) {
        if (!reduced_rotations || layer == 1) {
            for (int q = 0; q < n; ++q) {
                c.gates.push_back(Gate::rotation(q, PauliAxis::Y, slot++));
            }
        }
        const int offset = (layer % 2 == 1) ? 0 : 1;
        for (int q = offset; q + 1 < n; q += 2) {
            c.gates.push_back(Gate::cnot(q, q + 1));
        }
    }
    for (int q = 0; q < n; ++q) {
        ansatz.final_rotation_slots.push_back(slot);
        c.gates.push_back(Gate::rotation(q, PauliAxis::Y, slot++));
    }
    c.param_count = slot;
    validate_circuit(c);
    return ansatz;
}

/// Parameter vector preparing |+>^n: pi/2 in the last rotation on each
/// qubit, zero elsewhere (R_y(pi/2)|0> = (|0> + |1>)/sqrt(2), and the CNOT
/// rows act trivially on |0...0>).
inline std::vector<double> initial_params_plus_state(const HardwareEfficientAnsatz& ansatz) {
    std::vector<double> params(static_cast<std::size_t>(ansatz.circuit.param_count), 0.0);
    for (int slot : ansatz.final_rotation_slots) {
        params[static_cast<std::size_t>(slot)] = std::numbers::pi / 2.0;
    }
    return params;
}

// ---------------------------------------------------------------------------
// QAOA ansatz: |psi(gamma, beta)> = U(gamma_p, beta_p) ... U(gamma_1, beta_1)
// |+>^n with U(gamma_j, beta_j) = exp(-i gamma_j sum_q X_q) exp(-i beta_j H).
// The diagonal exp(-i beta H) is applied as a per-basis phase from energy(x);
// gate-level decomposition exists only for the gradient insertion points.
// ---------------------------------------------------------------------------

/// Rotation angle insertion for gradient circuits: an extra R_{X_q}(angle) or
/// R_{Z_mask}(angle) placed between the phase and the mixer of one layer.
struct QaoaInsertion {
    int layer = 0;  // 1-based; 0 = no insertion
    bool x_kind = true;
    int x_qubit = 0;            // when x_kind
    std::uint64_t z_mask = 0;   // when !x_kind, amplitude-bit positions
    double angle = 0.0;
};

inline void apply_zmask_rotation(StateVector& state, std::uint64_t mask, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const std::complex<double> plus(c, -s), minus(c, s);
    auto& amp = state.amplitudes();
    for (std::uint64_t x = 0; x < amp.size(); ++x) {
        amp[x] *= (std::popcount(x & mask) & 1) ? minus : plus;
    }
}

inline StateVector build_qaoa_state(const DiagonalHamiltonian& h, std::span<const double> gamma,
                                    std::span<const double> beta,
                                    const QaoaInsertion& insertion = {}) {
    if (gamma.size() != beta.size()) throw ValidationError("gamma and beta length mismatch");
    const int n = h.num_qubits();
    StateVector state(n);
    const double amp0 = std::pow(2.0, -0.5 * n);
    for (auto& a : state.amplitudes()) a = amp0;

    const int p = static_cast<int>(gamma.size());
    for (int j = 1; j <= p; ++j) {
        const double bj = beta[static_cast<std::size_t>(j - 1)];
        state.apply_diagonal_phase([&](std::uint64_t x) { return bj * h.energy(x); });
        if (insertion.layer == j) {
            if (insertion.x_kind) {
                state.apply_pauli_rotation({{insertion.x_qubit, PauliAxis::X}}, insertion.angle);
            } else {
                apply_zmask_rotation(state, insertion.z_mask, insertion.angle);
            }
        }
        const double gj = gamma[static_cast<std::size_t>(j - 1)];
        for (int q = 0; q < n; ++q) {
            state.apply_pauli_rotation({{q, PauliAxis::X}}, 2.0 * gj);  // exp(-i gamma X_q)
        }
    }
    return state;
}

/// Uniform initial parameters in [0, pi], seeded.
inline std::vector<double> qaoa_initial_params(int p, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x71616f61ULL));
    std::vector<double> params(static_cast<std::size_t>(2 * p));
    for (auto& v : params) v = rng.uniform(0.0, std::numbers::pi);
    return params;
}

namespace detail {

inline double qaoa_energy(const StateVector& state, const DiagonalHamiltonian& h,
                          const Measurement& meas, std::uint64_t stream) {
    if (meas.exact()) return energy_expectation(state, h);
    const SampleSet samples = sample(state, meas.shots, derive_seed(meas.seed, stream));
    return estimate_energy(samples, h);
}

}  // namespace detail

/// Analytical QAOA gradient of <H> with respect to (gamma_1..gamma_p,
/// beta_1..beta_p), evaluated from 2p(n+K) circuits with one rotation
/// inserted per circuit: R_{X_q}(+-pi/2) before layer j's mixer for the
/// gamma components, R_{Z_{Q_k}}(+-pi/2) after layer j's phase for the beta
/// components (weighted by the term coefficients h_k).
inline std::vector<double> qaoa_gradient(const DiagonalHamiltonian& h,
                                         std::span<const double> gamma,
                                         std::span<const double> beta, const Measurement& meas,
                                         std::uint64_t* circuit_evaluations = nullptr) {
    if (gamma.size() != beta.size()) throw ValidationError("gamma and beta length mismatch");
    const int p = static_cast<int>(gamma.size());
    const int n = h.num_qubits();
    const auto& terms = h.terms();
    std::vector<double> grad(static_cast<std::size_t>(2 * p), 0.0);
    std::uint64_t evals = 0;
    std::uint64_t stream = 0;

    const double half_pi = std::numbers::pi / 2.0;
    for (int j = 1; j <= p; ++j) {
        double dgamma = 0.0;
        for (int q = 0; q < n; ++q) {
            double diff = 0.0;
            for (const double sign : {+1.0, -1.0}) {
                QaoaInsertion ins;
                ins.layer = j;
                ins.x_kind = true;
                ins.x_qubit = q;
                ins.angle = sign * half_pi;
                const StateVector state = build_qaoa_state(h, gamma, beta, ins);
                ++evals;
                diff += sign * detail::qaoa_energy(state, h, meas, stream++);
            }
            dgamma += diff;
        }
        grad[static_cast<std::size_t>(j - 1)] = dgamma;

        double dbeta = 0.0;
        for (const auto& term : terms) {
            double diff = 0.0;
            for (const double sign : {+1.0, -1.0}) {
                QaoaInsertion ins;
                ins.layer = j;
                ins.x_kind = false;
                ins.z_mask = term.mask;
                ins.angle = sign * half_pi;
                const StateVector state = build_qaoa_state(h, gamma, beta, ins);
                ++evals;
                diff += sign * detail::qaoa_energy(state, h, meas, stream++);
            }
            dbeta += term.coeff * diff;
        }
        grad[static_cast<std::size_t>(p + j - 1)] = dbeta;
    }
    if (circuit_evaluations) *circuit_evaluations += evals;
    return grad;
}

}  // namespace fvqe
