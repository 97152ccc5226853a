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

#include "fvqe/statevector.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

#include "fvqe/ansatz.hpp"

using namespace fvqe;
using Complex = std::complex<double>;

namespace {

// Dense oracle: multiply the full 2^n matrix of exp(-i theta/2 P) into the
// state, built from explicit Pauli matrices.
std::vector<Complex> dense_pauli_rotation(const std::vector<Complex>& state, int width,
                                          const std::vector<std::pair<int, PauliAxis>>& support,
                                          double theta) {
    const std::uint64_t dim = 1ULL << width;
    // P|x> = c(x) |x ^ mx>
    std::uint64_t mx = 0, parity_mask = 0;
    int ny = 0;
    for (const auto& [q, axis] : support) {
        const std::uint64_t bit = 1ULL << (width - 1 - q);
        if (axis == PauliAxis::X) mx |= bit;
        if (axis == PauliAxis::Y) {
            mx |= bit;
            parity_mask |= bit;
            ++ny;
        }
        if (axis == PauliAxis::Z) parity_mask |= bit;
    }
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex iy = ipow[ny % 4];
    std::vector<Complex> out(dim, Complex(0, 0));
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    for (std::uint64_t x = 0; x < dim; ++x) {
        // exp(-i theta/2 P)|x> = cos|x> - i sin P|x>
        const double sign = (std::popcount(x & parity_mask) & 1) ? -1.0 : 1.0;
        out[x] += c * state[x];
        out[x ^ mx] += Complex(0, -s) * iy * sign * state[x];
    }
    return out;
}

std::vector<double> random_params(int count, std::uint64_t seed, double lo = 0.0,
                                  double hi = 2.0 * std::numbers::pi) {
    Rng rng(seed);
    std::vector<double> params(count);
    for (auto& p : params) p = rng.uniform(lo, hi);
    return params;
}

}  // namespace

TEST_CASE("empty circuit prepares |0...0>") {
    Circuit c;
    c.width = 3;
    const auto state = simulate(c, {});
    REQUIRE(state.probability(0) == Catch::Approx(1.0));
    REQUIRE(state.norm() == Catch::Approx(1.0));
}

TEST_CASE("R_y(pi/2) on every qubit prepares |+>^n") {
    const int n = 4;
    Circuit c;
    c.width = n;
    c.param_count = n;
    for (int q = 0; q < n; ++q) c.gates.push_back(Gate::rotation(q, PauliAxis::Y, q));
    std::vector<double> params(n, std::numbers::pi / 2);
    const auto state = simulate(c, params);
    const double expected = std::pow(2.0, -0.5 * n);
    for (std::uint64_t x = 0; x < state.size(); ++x) {
        REQUIRE(state.amplitudes()[x].real() == Catch::Approx(expected).margin(1e-12));
        REQUIRE(state.amplitudes()[x].imag() == Catch::Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("R_y convention: cos(theta/2)|0> + sin(theta/2)|1>") {
    Circuit c;
    c.width = 1;
    c.param_count = 1;
    c.gates.push_back(Gate::rotation(0, PauliAxis::Y, 0));
    const double theta = 0.73;
    const auto state = simulate(c, std::vector<double>{theta});
    REQUIRE(state.amplitudes()[0].real() == Catch::Approx(std::cos(theta / 2)));
    REQUIRE(state.amplitudes()[1].real() == Catch::Approx(std::sin(theta / 2)));
}

TEST_CASE("cnot truth table and hadamard") {
    Circuit c;
    c.width = 2;
    c.gates.push_back(Gate::hadamard(0));
    c.gates.push_back(Gate::cnot(0, 1));
    const auto state = simulate(c, {});
    // Bell state (|00> + |11>)/sqrt(2); qubit 0 is the MSB.
    REQUIRE(state.probability(0b00) == Catch::Approx(0.5));
    REQUIRE(state.probability(0b11) == Catch::Approx(0.5));
    REQUIRE(state.probability(0b01) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(state.probability(0b10) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("general Pauli-string rotations match the dense oracle") {
    const int width = 3;
    Rng rng(5);
    const std::vector<std::vector<std::pair<int, PauliAxis>>> supports = {
        {{0, PauliAxis::X}},
        {{1, PauliAxis::Y}},
        {{2, PauliAxis::Z}},
        {{0, PauliAxis::Z}, {2, PauliAxis::Z}},
        {{0, PauliAxis::X}, {1, PauliAxis::Z}},
        {{0, PauliAxis::Y}, {1, PauliAxis::X}, {2, PauliAxis::Z}},
        {{1, PauliAxis::Y}, {2, PauliAxis::Y}},
    };
    for (const auto& support : supports) {
        // Start from a random normalized state.
        StateVector state(width);
        double norm = 0.0;
        for (auto& a : state.amplitudes()) {
            a = Complex(rng.uniform(-1, 1), rng.uniform(-1, 1));
            norm += std::norm(a);
        }
        for (auto& a : state.amplitudes()) a /= std::sqrt(norm);
        const std::vector<Complex> before = state.amplitudes();
        const double theta = rng.uniform(0, 2 * std::numbers::pi);
        state.apply_pauli_rotation(support, theta);
        const auto expected = dense_pauli_rotation(before, width, support, theta);
        for (std::uint64_t x = 0; x < expected.size(); ++x) {
            REQUIRE(std::abs(state.amplitudes()[x] - expected[x]) < 1e-12);
        }
        REQUIRE(state.norm() == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("controlled rotations act only on the control-1 subspace") {
    Circuit c;
    c.width = 2;
    c.gates.push_back(Gate::controlled_rotation_fixed(0, 1, PauliAxis::Y, 1.1));
    const auto state = simulate(c, {});
    REQUIRE(state.probability(0) == Catch::Approx(1.0));  // control was |0>

    Circuit c2;
    c2.width = 2;
    c2.gates.push_back(Gate::rotation_fixed({{0, PauliAxis::Y}}, std::numbers::pi));  // |1> on control
    c2.gates.push_back(Gate::controlled_rotation_fixed(0, 1, PauliAxis::Y, 1.1));
    const auto state2 = simulate(c2, {});
    REQUIRE(state2.probability(0b10) == Catch::Approx(std::pow(std::cos(0.55), 2)));
    REQUIRE(state2.probability(0b11) == Catch::Approx(std::pow(std::sin(0.55), 2)));
}

TEST_CASE("random circuits preserve the norm") {
    const auto ansatz = build_hea(5, 3);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto params = random_params(ansatz.circuit.param_count, seed);
        const auto state = simulate(ansatz.circuit, params);
        REQUIRE(std::abs(state.norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("sampling: point mass, determinism, and binomial spread") {
    StateVector point(3);  // |000>
    const auto samples = sample(point, 50, 7);
    REQUIRE(samples.total == 50);
    REQUIRE(samples.counts.at(0) == 50);

    // |+>^2 via Hadamards: uniform over 4 strings.
    Circuit c;
    c.width = 2;
    c.gates.push_back(Gate::hadamard(0));
    c.gates.push_back(Gate::hadamard(1));
    const auto plus = simulate(c, {});

    const auto a = sample(plus, 4000, 123);
    const auto b = sample(plus, 4000, 123);
    REQUIRE(a.counts == b.counts);  // identical (state, M, seed) -> identical samples

    const double sigma = std::sqrt(4000 * 0.25 * 0.75);
    for (std::uint64_t x = 0; x < 4; ++x) {
        REQUIRE(std::abs(static_cast<double>(a.counts.at(x)) - 1000.0) < 5.0 * sigma);
    }
}

TEST_CASE("width cap produces a capability error") {
    REQUIRE_THROWS_AS(StateVector(27), CapabilityError);
    REQUIRE_NOTHROW(StateVector(10, 10));
    REQUIRE_THROWS_AS(StateVector(11, 10), CapabilityError);
}

TEST_CASE("z-product expectations") {
    Circuit c;
    c.width = 2;
    const auto zero = simulate(c, {});
    REQUIRE(zproduct_expectation(zero, 0b11) == Catch::Approx(1.0));  // <ZZ> on |00>

    Circuit plus;
    plus.width = 2;
    plus.gates.push_back(Gate::hadamard(0));
    plus.gates.push_back(Gate::hadamard(1));
    const auto p = simulate(plus, {});
    REQUIRE(zproduct_expectation(p, 0b10) == Catch::Approx(0.0).margin(1e-12));  // <Z_0> on |+>
}

TEST_CASE("circuit debug dump") {
    Circuit c;
    c.width = 3;
    c.param_count = 1;
    c.gates.push_back(Gate::rotation(1, PauliAxis::Y, 0));
    c.gates.push_back(Gate::cnot(0, 2));
    c.gates.push_back(Gate::hadamard(2));
    c.gates.push_back(Gate::controlled_rotation_fixed(2, 0, PauliAxis::Y, 0.5));
    std::ostringstream out;
    c.dump(out);
    REQUIRE(out.str() ==
            "GATE rot-y 1 [0]\n"
            "GATE cnot 0 2\n"
            "GATE h 2\n"
            "GATE c-rot-y 2 0 angle=0.5\n");
}

TEST_CASE("batch evaluation returns ordered, scheduling-independent results") {
    const auto ansatz = build_hea(5, 2);
    std::vector<std::vector<double>> params_list;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        params_list.push_back(random_params(ansatz.circuit.param_count, seed));
    }
    const auto batched = simulate_batch(ansatz.circuit, params_list);
    REQUIRE(batched.size() == params_list.size());
    for (std::size_t i = 0; i < params_list.size(); ++i) {
        const auto direct = simulate(ansatz.circuit, params_list[i]);
        for (std::uint64_t x = 0; x < direct.size(); ++x) {
            REQUIRE(batched[i].amplitudes()[x] == direct.amplitudes()[x]);
        }
    }
}

TEST_CASE("parameter vector length is validated") {
    const auto ansatz = build_hea(3, 1);
    std::vector<double> short_params(ansatz.circuit.param_count - 1, 0.0);
    REQUIRE_THROWS_AS(simulate(ansatz.circuit, short_params), ValidationError);
}
