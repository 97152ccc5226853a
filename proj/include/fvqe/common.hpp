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
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace fvqe {

/// Invalid input (sizes, domains of data structures, malformed files).
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Input is valid but outside what this build can handle (e.g. too many
/// qubits for dense simulation or brute-force enumeration).
class CapabilityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Energy outside the admissible domain of a filtering function.
class FilterDomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// All probability mass sits on states where the filter vanishes, so
/// filtered quantities are undefined.
class DegenerateFilterError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The tau search could not produce an acceptable filter strength.
class TauAdaptationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed stream splitting. Every independent random stream in
/// the project is derived from a master seed and a list of integer tags
/// (size, instance, algorithm, step, circuit, ...) by folding each tag into
/// the state with splitmix64. Identical (seed, tags) always yields the same
/// stream; any single run is re-derivable in isolation.
inline std::uint64_t derive_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, Tags... rest) {
    return derive_seed(splitmix64(seed ^ splitmix64(tag)), rest...);
}

/// Deterministic RNG wrapper. std::mt19937_64 is fully specified by the
/// standard; the distributions are not, so uniform doubles and bounded
/// integers are produced by hand here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound), unbiased by rejection.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[uniform_int(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

/// Round-trippable, platform-stable text form of a double (used for CSV
/// traces that must be byte-identical across reruns).
inline std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace fvqe
