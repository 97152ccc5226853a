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

#include "fvqe/hamiltonian.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "fvqe/paper_instance.hpp"

using namespace fvqe;

TEST_CASE("rescaling endpoints: optimum at 0 (tight bound), trivial cut at 1") {
    const auto g = generate_instance(7, 21);
    const auto opt = brute_force_optimum(g);

    const auto tight = DiagonalHamiltonian::from_graph(g, UpperBoundMode::BruteForce);
    REQUIRE(tight.energy(opt.basis) == Catch::Approx(0.0).margin(1e-12));
    const std::uint64_t trivial = (1ULL << g.num_qubits()) - 1;  // all z = +1
    REQUIRE(tight.energy(trivial) == Catch::Approx(1.0));
    REQUIRE(tight.cost_upper_bound() == Catch::Approx(opt.max_cost));

    const auto loose = DiagonalHamiltonian::from_graph(g, UpperBoundMode::WeightSum);
    REQUIRE(loose.cost_upper_bound() == Catch::Approx(g.total_weight()));
    REQUIRE(loose.energy(trivial) == Catch::Approx(1.0));
}

TEST_CASE("energies lie in [0,1] and decrease monotonically with cut cost") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        const auto g = generate_instance(5, seed);
        for (const auto mode : {UpperBoundMode::BruteForce, UpperBoundMode::WeightSum}) {
            const auto h = DiagonalHamiltonian::from_graph(g, mode);
            for (std::uint64_t x = 0; x < 32; ++x) {
                REQUIRE(h.energy(x) >= -1e-12);
                REQUIRE(h.energy(x) <= 1.0 + 1e-12);
            }
            for (std::uint64_t x = 0; x < 32; ++x) {
                for (std::uint64_t y = 0; y < 32; ++y) {
                    const double cx = cut_cost_of_basis(g, x);
                    const double cy = cut_cost_of_basis(g, y);
                    if (cx > cy + 1e-12) REQUIRE(h.energy(x) < h.energy(y));
                }
            }
        }
    }
}

TEST_CASE("term decomposition reproduces a - b*C(x) for every basis state") {
    const auto g = generate_instance(9, 33);
    const auto h = DiagonalHamiltonian::from_graph(g, UpperBoundMode::WeightSum);
    for (std::uint64_t x = 0; x < (1ULL << 9); ++x) {
        const double direct =
            h.rescale_a() - h.rescale_b() * cut_cost_of_basis(g, x);
        REQUIRE(h.energy(x) == Catch::Approx(direct).margin(1e-12));
    }
}

TEST_CASE("approximation ratio endpoints and validation") {
    const auto g = generate_instance(5, 9);
    const auto opt = brute_force_optimum(g);
    std::vector<double> dist(32, 0.0);

    dist[opt.basis] = 1.0;
    REQUIRE(approximation_ratio(dist, g) == Catch::Approx(1.0));

    std::fill(dist.begin(), dist.end(), 0.0);
    dist[31] = 1.0;  // trivial all-(+1) cut
    REQUIRE(approximation_ratio(dist, g) == Catch::Approx(0.0).margin(1e-12));

    std::fill(dist.begin(), dist.end(), 0.5 / 32);  // unnormalized
    REQUIRE_THROWS_AS(approximation_ratio(dist, g), ValidationError);
}

TEST_CASE("uniform-distribution ratio matches independent enumeration") {
    const auto g = generate_instance(5, 14);
    std::vector<double> uniform(32, 1.0 / 32);
    double mean_cost = 0.0;
    for (std::uint64_t x = 0; x < 32; ++x) {
        mean_cost += cut_cost(g, cut_from_basis(x, 6)) / 32.0;
    }
    const double expected = mean_cost / brute_force_optimum(g).max_cost;
    REQUIRE(approximation_ratio(uniform, g) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("weight-sum rescaling keeps the reference optimum strictly above 0") {
    const auto g = load_graph_file(std::string(FVQE_DATA_DIR) + "/table2.graph");
    const auto h = DiagonalHamiltonian::from_graph(g, UpperBoundMode::WeightSum);
    const auto opt = brute_force_optimum(g);
    const double ground = h.energy(opt.basis);
    REQUIRE(ground > 0.0);
    REQUIRE(ground == Catch::Approx(1.0 - 5.2214 / 5.5206).epsilon(1e-9));
}

TEST_CASE("ground-energy floor inflates a tight bound") {
    // K_{3,3} is bipartite: the weight-sum bound is tight without the floor.
    const WeightedGraph k33(6, {{1, 4, 0.5}, {1, 5, 0.5}, {1, 6, 0.5}, {2, 4, 0.5}, {2, 5, 0.5},
                                {2, 6, 0.5}, {3, 4, 0.5}, {3, 5, 0.5}, {3, 6, 0.5}});
    const auto bare = MaxCutProblem::build(k33, UpperBoundMode::WeightSum);
    REQUIRE(bare.hamiltonian.energy(bare.optimal_basis) == Catch::Approx(0.0).margin(1e-12));
    REQUIRE_FALSE(bare.bound_inflated);

    const auto floored = MaxCutProblem::build(k33, UpperBoundMode::WeightSum, 1e-3);
    REQUIRE(floored.bound_inflated);
    REQUIRE(floored.hamiltonian.energy(floored.optimal_basis) == Catch::Approx(1e-3).epsilon(1e-6));
    for (std::uint64_t x = 0; x < 32; ++x) {
        REQUIRE(floored.hamiltonian.energy(x) > 0.0);
    }
}
