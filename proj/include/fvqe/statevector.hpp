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

#include <atomic>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "fvqe/circuit.hpp"
#include "fvqe/common.hpp"
#include "fvqe/filters.hpp"
#include "fvqe/hamiltonian.hpp"
#include "fvqe/sampling.hpp"

namespace fvqe {

/// Dense simulation refuses above this width unless the caller raises the
/// cap explicitly (2^26 amplitudes = 1 GiB of complex doubles).
inline constexpr int kDefaultMaxSimQubits = 26;

/// Exact complex amplitudes over 2^width basis states. Circuit qubit q
/// occupies bit position width-1-q of the amplitude index, so qubit 0 is the
/// most significant bit, matching the graph/Hamiltonian convention.
class StateVector {
  public:
    using Complex = std::complex<double>;

    explicit StateVector(int width, int max_qubits = kDefaultMaxSimQubits) : width_(width) {
        if (width < 1) throw ValidationError("state needs at least one qubit");
        if (width > max_qubits) {
            throw CapabilityError("statevector width " + std::to_string(width) +
                                  " exceeds the cap of " + std::to_string(max_qubits));
        }
        amp_.assign(1ULL << width, Complex(0.0, 0.0));
        amp_[0] = Complex(1.0, 0.0);
    }

    int width() const { return width_; }
    std::uint64_t size() const { return amp_.size(); }
    std::vector<Complex>& amplitudes() { return amp_; }
    const std::vector<Complex>& amplitudes() const { return amp_; }

    double norm() const {
        double sum = 0.0;
        for (const auto& a : amp_) sum += std::norm(a);
        return std::sqrt(sum);
    }

    double probability(std::uint64_t x) const { return std::norm(amp_[x]); }

    std::vector<double> probabilities() const {
        std::vector<double> p(amp_.size());
        for (std::uint64_t x = 0; x < amp_.size(); ++x) p[x] = std::norm(amp_[x]);
        return p;
    }

    int bit_position(int qubit) const { return width_ - 1 - qubit; }

    void apply(const Gate& gate, std::span<const double> params) {
        switch (gate.kind) {
            case Gate::Kind::Rotation: {
                double theta = gate.angle;
                if (gate.slot >= 0) {
                    if (gate.slot >= static_cast<int>(params.size())) {
                        throw ValidationError("parameter slot out of range");
                    }
                    theta = params[static_cast<std::size_t>(gate.slot)];
                }
                apply_pauli_rotation(gate.support, theta, gate.control);
                break;
            }
            case Gate::Kind::Cnot: apply_cnot(gate.q0, gate.q1); break;
            case Gate::Kind::Hadamard: apply_hadamard(gate.q0); break;
        }
    }

    /// exp(-i theta/2 * P) with P the Pauli string over (qubit, axis) pairs,
    /// optionally applied only where the control qubit is |1>.
    void apply_pauli_rotation(const std::vector<std::pair<int, PauliAxis>>& support, double theta,
                              int control = -1) {
        std::uint64_t mx = 0, my = 0, mz = 0;
        for (const auto& [q, axis] : support) {
            const std::uint64_t bit = 1ULL << bit_position(q);
            switch (axis) {
                case PauliAxis::X: mx |= bit; break;
                case PauliAxis::Y:
                    mx |= bit;
                    my |= bit;
                    break;
                case PauliAxis::Z: mz |= bit; break;
            }
        }
        const std::uint64_t cmask = control >= 0 ? (1ULL << bit_position(control)) : 0;
        const double c = std::cos(theta / 2.0);
        const double s = std::sin(theta / 2.0);
        const Complex mis(0.0, -s);  // -i sin(theta/2)

        if (mx == 0) {
            // Pure Z string: a diagonal phase exp(-i theta/2 * (+/-1)).
            const Complex phase_plus(c, -s);
            const Complex phase_minus(c, s);
            for (std::uint64_t x = 0; x < amp_.size(); ++x) {
                if (cmask && !(x & cmask)) continue;
                const bool odd = std::popcount(x & mz) & 1;
                amp_[x] *= odd ? phase_minus : phase_plus;
            }
            return;
        }

        // i^{#Y} from the Y factors; the (-1) parities depend on the index.
        const int ny = std::popcount(my);
        static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        const Complex iy = kIPow[ny % 4];
        const std::uint64_t pivot = 1ULL << (63 - std::countl_zero(mx));
        const std::uint64_t parity_mask = mz | my;

        for (std::uint64_t x = 0; x < amp_.size(); ++x) {
            if (x & pivot) continue;  // enumerate each {x, x^mx} pair once
            if (cmask && !(x & cmask)) continue;
            const std::uint64_t y = x ^ mx;
            const Complex ax = amp_[x];
            const Complex ay = amp_[y];
            const double sign_x = (std::popcount(x & parity_mask) & 1) ? -1.0 : 1.0;
            const double sign_y = (std::popcount(y & parity_mask) & 1) ? -1.0 : 1.0;
            const Complex cx = iy * sign_x;  // P|x> = cx |y>
            const Complex cy = iy * sign_y;  // P|y> = cy |x>
            amp_[x] = c * ax + mis * cy * ay;
            amp_[y] = c * ay + mis * cx * ax;
        }
    }

    void apply_cnot(int control, int target) {
        const std::uint64_t cb = 1ULL << bit_position(control);
        const std::uint64_t tb = 1ULL << bit_position(target);
        for (std::uint64_t x = 0; x < amp_.size(); ++x) {
            if ((x & cb) && !(x & tb)) std::swap(amp_[x], amp_[x | tb]);
        }
    }

    void apply_hadamard(int qubit) {
        const std::uint64_t b = 1ULL << bit_position(qubit);
        const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
        for (std::uint64_t x = 0; x < amp_.size(); ++x) {
            if (x & b) continue;
            const Complex a0 = amp_[x];
            const Complex a1 = amp_[x | b];
            amp_[x] = inv_sqrt2 * (a0 + a1);
            amp_[x | b] = inv_sqrt2 * (a0 - a1);
        }
    }

    /// Multiply each amplitude by exp(-i angle(x)); used for diagonal
    /// Hamiltonian evolution.
    template <typename AngleFn>
    void apply_diagonal_phase(AngleFn&& angle_of_basis) {
        for (std::uint64_t x = 0; x < amp_.size(); ++x) {
            const double a = angle_of_basis(x);
            amp_[x] *= Complex(std::cos(a), -std::sin(a));
        }
    }

  private:
    int width_;
    std::vector<Complex> amp_;
};

/// Exact state prepared by running the circuit on |0...0>.
inline StateVector simulate(const Circuit& circuit, std::span<const double> params,
                            int max_qubits = kDefaultMaxSimQubits) {
    if (static_cast<int>(params.size()) != circuit.param_count) {
        throw ValidationError("parameter vector length mismatch");
    }
    StateVector state(circuit.width, max_qubits);
    for (const auto& g : circuit.gates) state.apply(g, params);
    return state;
}

/// Computational-basis sampling; deterministic per (state, shots, seed).
inline SampleSet sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
    const auto probs = state.probabilities();
    return sample_distribution(probs, shots, seed);
}

/// Batch evaluation of one circuit over many parameter vectors. Results are
/// ordered to match the inputs and are identical regardless of how the work
/// is scheduled across threads.
inline std::vector<StateVector> simulate_batch(const Circuit& circuit,
                                               const std::vector<std::vector<double>>& params_list,
                                               int max_qubits = kDefaultMaxSimQubits) {
    std::vector<StateVector> states;
    states.reserve(params_list.size());
    const unsigned pool = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                          static_cast<unsigned>(params_list.size())));
    if (pool <= 1 || params_list.size() <= 1) {
        for (const auto& params : params_list) {
            states.push_back(simulate(circuit, params, max_qubits));
        }
        return states;
    }
    for (std::size_t i = 0; i < params_list.size(); ++i) states.emplace_back(1);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < pool; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= params_list.size()) break;
                states[i] = simulate(circuit, params_list[i], max_qubits);
            }
        });
    }
    for (auto& worker : workers) worker.join();
    return states;
}

/// <prod_{bits in mask} Z> on the state; the mask uses amplitude-index bit
/// positions (the same space as PauliZTerm::mask).
inline double zproduct_expectation(const StateVector& state, std::uint64_t mask) {
    double sum = 0.0;
    const auto& amp = state.amplitudes();
    for (std::uint64_t x = 0; x < amp.size(); ++x) {
        const double p = std::norm(amp[x]);
        if (p == 0.0) continue;
        sum += (std::popcount(x & mask) & 1) ? -p : p;
    }
    return sum;
}

inline double energy_expectation(const StateVector& state, const DiagonalHamiltonian& h) {
    double sum = 0.0;
    const auto& amp = state.amplitudes();
    for (std::uint64_t x = 0; x < amp.size(); ++x) {
        const double p = std::norm(amp[x]);
        if (p > 0.0) sum += p * h.energy(x);
    }
    return sum;
}

/// simulate -> sample -> filter-moment estimate; exact mode bypasses the
/// sampling and uses the full distribution.
inline double expectation_via_samples(const Circuit& circuit, std::span<const double> params,
                                      const DiagonalHamiltonian& h, const FilterSpec& spec,
                                      int power, const Measurement& meas) {
    const StateVector state = simulate(circuit, params);
    if (meas.exact()) {
        const auto dist = state.probabilities();
        return estimate_expectation(std::span<const double>(dist), h, spec, power);
    }
    return estimate_expectation(sample(state, meas.shots, meas.seed), h, spec, power);
}

}  // namespace fvqe
