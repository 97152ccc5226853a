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

#include "fvqe/graph.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "fvqe/paper_instance.hpp"

using namespace fvqe;

namespace {

WeightedGraph single_edge(double w = 1.0) { return WeightedGraph(2, {{1, 2, w}}); }

WeightedGraph k4(double w = 1.0) {
    return WeightedGraph(4, {{1, 2, w}, {1, 3, w}, {1, 4, w}, {2, 3, w}, {2, 4, w}, {3, 4, w}});
}

}  // namespace

TEST_CASE("generated instances are valid 3-regular graphs") {
    const auto g = generate_instance(9, 1234);
    REQUIRE(g.num_vertices() == 10);
    REQUIRE(g.num_qubits() == 9);
    REQUIRE(g.edges().size() == 15);  // 3N/2 edges forced by regularity
    REQUIRE(g.is_three_regular());
    for (const auto& e : g.edges()) {
        REQUIRE(e.u < e.v);
        REQUIRE(e.weight >= 0.0);
        REQUIRE(e.weight <= 1.0);
    }
}

TEST_CASE("odd vertex counts are rejected") {
    REQUIRE_THROWS_AS(generate_instance(4, 0), ValidationError);  // 5 vertices
    REQUIRE_THROWS_AS(generate_instance(2, 0), ValidationError);
}

TEST_CASE("generation is deterministic per seed and varies across seeds") {
    const auto a = generate_instance(7, 77);
    const auto b = generate_instance(7, 77);
    REQUIRE(a.edges().size() == b.edges().size());
    for (std::size_t i = 0; i < a.edges().size(); ++i) {
        REQUIRE(a.edges()[i].u == b.edges()[i].u);
        REQUIRE(a.edges()[i].v == b.edges()[i].v);
        REQUIRE(a.edges()[i].weight == b.edges()[i].weight);
    }
    int differing = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto c = generate_instance(7, seed);
        bool same = c.edges().size() == a.edges().size();
        if (same) {
            for (std::size_t i = 0; i < a.edges().size(); ++i) {
                if (c.edges()[i].u != a.edges()[i].u || c.edges()[i].v != a.edges()[i].v ||
                    c.edges()[i].weight != a.edges()[i].weight) {
                    same = false;
                    break;
                }
            }
        }
        differing += same ? 0 : 1;
    }
    REQUIRE(differing == 8);
}

TEST_CASE("graph validation rejects malformed inputs") {
    REQUIRE_THROWS_AS(WeightedGraph(3, {{1, 2, 0.5}}), ValidationError);  // disconnected
    REQUIRE_THROWS_AS(WeightedGraph(2, {{1, 1, 0.5}}), ValidationError);  // self loop
    REQUIRE_THROWS_AS(WeightedGraph(2, {{1, 2, 0.5}, {1, 2, 0.4}}), ValidationError);
    REQUIRE_THROWS_AS(WeightedGraph(2, {{1, 2, 1.5}}), ValidationError);  // weight range
    REQUIRE_THROWS_AS(WeightedGraph(2, {{1, 3, 0.5}}), ValidationError);  // endpoint range
}

TEST_CASE("graph file round-trip") {
    const auto g = generate_instance(5, 3);
    std::stringstream buffer;
    g.save(buffer);
    const auto loaded = WeightedGraph::load(buffer);
    REQUIRE(loaded.num_vertices() == g.num_vertices());
    REQUIRE(loaded.edges().size() == g.edges().size());
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        REQUIRE(loaded.edges()[i].weight == g.edges()[i].weight);
    }
}

TEST_CASE("cut cost basics") {
    const auto g = single_edge(0.7);
    REQUIRE(cut_cost(g, {+1, +1}) == 0.0);            // trivial cut
    REQUIRE(cut_cost(g, {-1, +1}) == Catch::Approx(0.7));  // endpoints separated
    REQUIRE_THROWS_AS(cut_cost(g, {+1, -1}), ValidationError);      // last entry must be +1
    REQUIRE_THROWS_AS(cut_cost(g, {+1, +1, +1}), ValidationError);  // length mismatch
    REQUIRE_THROWS_AS(cut_cost(g, {0, 1}), ValidationError);        // domain

    const auto complete = k4();
    REQUIRE(cut_cost(complete, {+1, +1, +1, +1}) == 0.0);
    REQUIRE(cut_cost(complete, {-1, -1, +1, +1}) == Catch::Approx(4.0));
}

TEST_CASE("brute force on K4 finds the balanced cut") {
    const auto result = brute_force_optimum(k4());
    REQUIRE(result.max_cost == Catch::Approx(4.0));
    REQUIRE(cut_cost(k4(), result.cut) == Catch::Approx(result.max_cost));
}

TEST_CASE("brute force equals exhaustive cut_cost enumeration") {
    const auto g = generate_instance(7, 5);
    const auto result = brute_force_optimum(g);
    double best = -1.0;
    std::uint64_t best_x = 0;
    for (std::uint64_t x = 0; x < (1ULL << g.num_qubits()); ++x) {
        const double c = cut_cost(g, cut_from_basis(x, g.num_vertices()));
        if (c > best) {
            best = c;
            best_x = x;
        }
    }
    REQUIRE(result.max_cost == Catch::Approx(best));
    REQUIRE(result.basis == best_x);
    REQUIRE(result.cut.back() == +1);
}

TEST_CASE("brute force ties break toward the lowest basis index") {
    // Unweighted path 1-2-3: cuts (0,1,...) all tie at cost 2 except extremes.
    const WeightedGraph path(4, {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
    const auto result = brute_force_optimum(path);
    REQUIRE(result.max_cost == Catch::Approx(3.0));
    // Alternating cut -1,+1,-1,+1 <-> bits (0,1,0) is the unique optimum here.
    REQUIRE(result.basis == 0b010);
    // A genuinely degenerate case: single edge, two optimal... none. Use a
    // triangle where two cuts tie.
    const WeightedGraph triangle(4, {{1, 2, 1.0}, {1, 3, 1.0}, {2, 3, 1.0}, {1, 4, 0.0}});
    const auto tie = brute_force_optimum(triangle);
    double best = -1.0;
    std::uint64_t first_best = 0;
    for (std::uint64_t x = 0; x < 8; ++x) {
        const double c = cut_cost(triangle, cut_from_basis(x, 4));
        if (c > best + 1e-12) {
            best = c;
            first_best = x;
        }
    }
    REQUIRE(tie.basis == first_best);
}

TEST_CASE("brute force on a single edge separates the endpoints") {
    const auto result = brute_force_optimum(single_edge(0.3));
    REQUIRE(result.max_cost == Catch::Approx(0.3));
    REQUIRE(result.cut == Cut{-1, +1});
}

TEST_CASE("brute force refuses oversized instances") {
    std::vector<WeightedEdge> chain;
    for (int v = 1; v < 28; ++v) chain.push_back({v, v + 1, 0.5});
    const WeightedGraph big(28, std::move(chain));
    REQUIRE_THROWS_AS(brute_force_optimum(big), CapabilityError);
}

TEST_CASE("basis encoding: qubit 1 is the most significant bit, bit 1 = +1") {
    // 3 qubits: x = 0b011 -> z = (-1, +1, +1), last vertex fixed +1.
    const Cut cut = cut_from_basis(0b011, 4);
    REQUIRE(cut == Cut{-1, +1, +1, +1});
    REQUIRE(basis_from_cut(cut) == 0b011);
    REQUIRE(basis_to_string(0b011, 3) == "011");
}

TEST_CASE("reference instance brute-forces to the known partition") {
    const auto g = load_graph_file(std::string(FVQE_DATA_DIR) + "/table2.graph", true);
    REQUIRE(g.num_vertices() == 10);
    REQUIRE(g.edges().size() == 15);
    REQUIRE(g.total_weight() == Catch::Approx(5.5206));
    const auto result = brute_force_optimum(g);
    REQUIRE(basis_to_string(result.basis, 9) == "011001011");
    REQUIRE(result.max_cost == Catch::Approx(5.2214).epsilon(1e-9));
}
