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

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "fvqe/common.hpp"

namespace fvqe {

/// Measurement-shot counts per basis index.
struct SampleSet {
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(std::uint64_t basis, std::uint64_t n = 1) {
        counts[basis] += n;
        total += n;
    }
};

/// How expectation values are estimated: shots == 0 means exact mode (the
/// full probability distribution is used instead of sampling).
struct Measurement {
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;

    bool exact() const { return shots == 0; }
};

/// Multinomial draw from a probability vector by inverse-CDF lookup.
/// Deterministic given the seed.
inline SampleSet sample_distribution(std::span<const double> probabilities, std::uint64_t shots,
                                     std::uint64_t seed) {
    if (shots == 0) throw ValidationError("shot count must be >= 1");
    std::vector<double> cdf(probabilities.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        cdf[i] = acc;
    }
    Rng rng(seed);
    SampleSet samples;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t idx =
            it == cdf.end() ? cdf.size() - 1 : static_cast<std::uint64_t>(it - cdf.begin());
        samples.add(idx);
    }
    return samples;
}

}  // namespace fvqe
