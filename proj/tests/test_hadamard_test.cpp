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

#include "fvqe/hadamard_test.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numbers>

#include "fvqe/ansatz.hpp"

using namespace fvqe;
using Complex = std::complex<double>;

namespace {

DiagonalHamiltonian small_hamiltonian(int n) {
    std::vector<PauliZTerm> terms;
    for (int q = 0; q < n; ++q) terms.push_back({0.2 / n, 1ULL << q});
    return DiagonalHamiltonian::from_terms(n, 0.5, std::move(terms));
}

std::vector<double> random_params(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> params(count);
    for (auto& p : params) p = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return params;
}

// Dense oracle: sum_x f(E_x) conj(psi_phi(x)) psi_theta(x), real part.
double dense_overlap(const Circuit& ansatz, const std::vector<double>& theta,
                     const std::vector<double>& phi, const DiagonalHamiltonian& h,
                     const FilterSpec& spec) {
    const auto st = simulate(ansatz, theta);
    const auto sp = simulate(ansatz, phi);
    Complex sum(0, 0);
    for (std::uint64_t x = 0; x < st.size(); ++x) {
        sum += std::conj(sp.amplitudes()[x]) * st.amplitudes()[x] *
               filter_value(spec, h.energy(x));
    }
    return sum.real();
}

}  // namespace

TEST_CASE("the overlap circuit prepares the advertised superposition") {
    const auto ansatz = build_hea(3, 1);
    const auto theta = random_params(ansatz.circuit.param_count, 1);
    const auto phi = random_params(ansatz.circuit.param_count, 2);
    const auto w = build_overlap_test_circuit(ansatz.circuit, theta, phi);
    REQUIRE(w.width == 4);
    const auto state = simulate(w, {});

    const auto st = simulate(ansatz.circuit, theta);
    const auto sp = simulate(ansatz.circuit, phi);
    for (std::uint64_t x = 0; x < st.size(); ++x) {
        const Complex plus = 0.5 * (st.amplitudes()[x] + sp.amplitudes()[x]);
        const Complex minus = 0.5 * (st.amplitudes()[x] - sp.amplitudes()[x]);
        REQUIRE(std::abs(state.amplitudes()[2 * x] - plus) < 1e-12);       // ancilla |0>
        REQUIRE(std::abs(state.amplitudes()[2 * x + 1] - minus) < 1e-12);  // ancilla |1>
    }
}

TEST_CASE("overlap at phi = theta is the plain filter expectation") {
    const auto ansatz = build_hea(4, 2);
    const auto h = small_hamiltonian(4);
    const auto theta = random_params(ansatz.circuit.param_count, 3);
    for (const auto family : {FilterFamily::Inverse, FilterFamily::Exponential}) {
        const FilterSpec spec{family, 1.2};
        const double overlap =
            hadamard_test_overlap(theta, theta, ansatz.circuit, h, spec, Measurement{});
        const auto state = simulate(ansatz.circuit, theta);
        double expected = 0.0;
        for (std::uint64_t x = 0; x < state.size(); ++x) {
            expected += state.probability(x) * filter_value(spec, h.energy(x));
        }
        REQUIRE(overlap == Catch::Approx(expected).margin(1e-10));
    }
}

TEST_CASE("identity filter reduces to the plain state overlap") {
    const auto ansatz = build_hea(3, 1);
    const auto h = small_hamiltonian(3);
    const auto theta = random_params(ansatz.circuit.param_count, 4);
    const auto phi = random_params(ansatz.circuit.param_count, 5);
    // Exponential at vanishing tau is the identity operator.
    const FilterSpec identity{FilterFamily::Exponential, 1e-300};
    const double overlap =
        hadamard_test_overlap(theta, phi, ansatz.circuit, h, identity, Measurement{});
    const auto st = simulate(ansatz.circuit, theta);
    const auto sp = simulate(ansatz.circuit, phi);
    Complex dot(0, 0);
    for (std::uint64_t x = 0; x < st.size(); ++x) {
        dot += std::conj(sp.amplitudes()[x]) * st.amplitudes()[x];
    }
    REQUIRE(overlap == Catch::Approx(dot.real()).margin(1e-12));
}

TEST_CASE("random theta != phi matches the dense oracle in exact mode") {
    const auto ansatz = build_hea(4, 2);
    const auto h = small_hamiltonian(4);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto theta = random_params(ansatz.circuit.param_count, 10 + seed);
        const auto phi = random_params(ansatz.circuit.param_count, 20 + seed);
        const FilterSpec spec{FilterFamily::Exponential, 1.0};
        const double overlap =
            hadamard_test_overlap(theta, phi, ansatz.circuit, h, spec, Measurement{});
        REQUIRE(overlap ==
                Catch::Approx(dense_overlap(ansatz.circuit, theta, phi, h, spec)).margin(1e-10));
    }
}

TEST_CASE("sampled overlap is deterministic and concentrates around exact") {
    const auto ansatz = build_hea(3, 1);
    const auto h = small_hamiltonian(3);
    const auto theta = random_params(ansatz.circuit.param_count, 6);
    const auto phi = random_params(ansatz.circuit.param_count, 7);
    const FilterSpec spec{FilterFamily::Exponential, 1.0};
    const Measurement meas{8192, 5};
    const double a = hadamard_test_overlap(theta, phi, ansatz.circuit, h, spec, meas);
    const double b = hadamard_test_overlap(theta, phi, ansatz.circuit, h, spec, meas);
    REQUIRE(a == b);
    const double exact = hadamard_test_overlap(theta, phi, ansatz.circuit, h, spec, Measurement{});
    REQUIRE(std::abs(a - exact) < 0.06);
}
