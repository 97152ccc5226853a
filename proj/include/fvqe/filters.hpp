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
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fvqe/common.hpp"
#include "fvqe/hamiltonian.hpp"
#include "fvqe/sampling.hpp"

namespace fvqe {

enum class FilterFamily { Inverse, Logarithm, Exponential, Power, Cosine, Chebyshev };

inline std::string to_string(FilterFamily family) {
    switch (family) {
        case FilterFamily::Inverse: return "inverse";
        case FilterFamily::Logarithm: return "logarithm";
        case FilterFamily::Exponential: return "exponential";
        case FilterFamily::Power: return "power";
        case FilterFamily::Cosine: return "cosine";
        case FilterFamily::Chebyshev: return "chebyshev";
    }
    return "?";
}

inline FilterFamily filter_family_from_string(const std::string& s) {
    if (s == "inverse") return FilterFamily::Inverse;
    if (s == "logarithm") return FilterFamily::Logarithm;
    if (s == "exponential") return FilterFamily::Exponential;
    if (s == "power") return FilterFamily::Power;
    if (s == "cosine") return FilterFamily::Cosine;
    if (s == "chebyshev") return FilterFamily::Chebyshev;
    throw ValidationError("unknown filter family: " + s);
}

/// Filter family plus strength tau. The squared filter function must be
/// strictly decreasing in energy; tau interpolates between the identity
/// (tau -> 0) and a ground-state projector (tau -> infinity). Chebyshev
/// admits positive integers only.
struct FilterSpec {
    FilterFamily family = FilterFamily::Inverse;
    double tau = 1.0;

    FilterSpec() = default;
    FilterSpec(FilterFamily f, double t) : family(f), tau(t) { validate(); }

    void validate() const {
        if (!(tau > 0.0)) throw ValidationError("filter tau must be positive");
        if (family == FilterFamily::Chebyshev &&
            (std::floor(tau) != tau || tau < 1.0 || tau > 1e6)) {
            throw ValidationError("Chebyshev tau must be a positive integer");
        }
    }
};

/// Coefficient g_s of the order-tau Chebyshev approximation to the Dirac
/// delta: g_s = [(tau-s+1) cos(pi s/(tau+1)) + sin(pi s/(tau+1)) cot(pi/(tau+1))] / (tau+1).
inline double chebyshev_coefficient(int s, int tau) {
    if (tau < 1) throw ValidationError("Chebyshev order must be >= 1");
    if (s < 0 || s > tau) throw ValidationError("Chebyshev coefficient index out of range");
    const double t = tau;
    const double angle = std::numbers::pi * s / (t + 1.0);
    const double cot = std::cos(std::numbers::pi / (t + 1.0)) / std::sin(std::numbers::pi / (t + 1.0));
    return ((t - s + 1.0) * std::cos(angle) + std::sin(angle) * cot) / (t + 1.0);
}

/// Even-order Chebyshev delta expansion,
///   f(E) = sum_{r=0}^{floor(tau/2)} (-1)^r (2 - delta_{r,0})/pi g_{2r} T_{2r}(E),
/// with T_{s+1} = 2 E T_s - T_{s-1}, T_0 = 1, T_1 = E.
inline double chebyshev_filter_value(double E, int tau) {
    if (tau < 1) throw ValidationError("Chebyshev order must be >= 1");
    if (std::abs(E) > 1.0) throw FilterDomainError("Chebyshev filter requires |E| <= 1");
    double t_prev = 1.0;  // T_0
    double t_curr = E;    // T_1
    double sum = chebyshev_coefficient(0, tau) / std::numbers::pi;  // r = 0 term, T_0 = 1
    int s = 1;
    for (int r = 1; 2 * r <= tau; ++r) {
        while (s < 2 * r) {
            const double t_next = 2.0 * E * t_curr - t_prev;
            t_prev = t_curr;
            t_curr = t_next;
            ++s;
        }
        const double sign = (r % 2 == 0) ? 1.0 : -1.0;
        sum += sign * (2.0 / std::numbers::pi) * chebyshev_coefficient(2 * r, tau) * t_curr;
    }
    return sum;
}

namespace detail {

inline void check_filter_domain(FilterFamily family, double E) {
    switch (family) {
        case FilterFamily::Inverse:
            if (!(E > 0.0)) throw FilterDomainError("inverse filter requires E > 0");
            break;
        case FilterFamily::Logarithm:
            if (!(E > 0.0) || E > 1.0) {
                throw FilterDomainError("logarithm filter requires 0 < E <= 1");
            }
            break;
        case FilterFamily::Exponential:
            break;
        case FilterFamily::Power:
            if (E > 1.0) throw FilterDomainError("power filter requires E <= 1");
            break;
        case FilterFamily::Cosine:
            if (std::abs(E) >= std::numbers::pi / 2.0) {
                throw FilterDomainError("cosine filter requires |E| < pi/2");
            }
            break;
        case FilterFamily::Chebyshev:
            if (std::abs(E) > 1.0) throw FilterDomainError("Chebyshev filter requires |E| <= 1");
            break;
    }
}

/// log f(E) for the families with nonnegative f. -inf where f = 0.
inline double log_filter_value(const FilterSpec& spec, double E) {
    check_filter_domain(spec.family, E);
    switch (spec.family) {
        case FilterFamily::Inverse: return -spec.tau * std::log(E);
        case FilterFamily::Logarithm: return spec.tau * std::log(-std::log(E));
        case FilterFamily::Exponential: return -spec.tau * E;
        case FilterFamily::Power: return spec.tau * std::log1p(-E);
        case FilterFamily::Cosine: return spec.tau * std::log(std::cos(E));
        case FilterFamily::Chebyshev:
            throw ValidationError("Chebyshev filter has no log form (it may be negative)");
    }
    return 0.0;
}

}  // namespace detail

/// f(E; tau). Hard domain errors instead of clamping: a silently clamped
/// energy would corrupt the monotonicity the algorithms rely on.
inline double filter_value(const FilterSpec& spec, double E) {
    spec.validate();
    if (spec.family == FilterFamily::Chebyshev) {
        detail::check_filter_domain(spec.family, E);
        return chebyshev_filter_value(E, static_cast<int>(spec.tau));
    }
    return std::exp(detail::log_filter_value(spec, E));
}

/// Filter evaluations rescaled by a fixed factor exp(log_shift). All the
/// quantities the algorithms consume (gradients, Hessian diagonals, cost
/// ratios, redistributions) are invariant under a common positive rescaling
/// of f, so a shift chosen near max log f keeps every intermediate finite
/// even when tau is large. power = 2 is evaluated as the square of the
/// shifted f, never by squaring an unshifted intermediate.
class ScaledFilter {
  public:
    ScaledFilter(FilterSpec spec, double log_shift) : spec_(spec), log_shift_(log_shift) {
        spec_.validate();
    }

    const FilterSpec& spec() const { return spec_; }
    double log_shift() const { return log_shift_; }

    double value(double E) const { return value_pow(E, 1); }

    double value_pow(double E, int power) const {
        if (spec_.family == FilterFamily::Chebyshev) {
            detail::check_filter_domain(spec_.family, E);
            const double scaled =
                chebyshev_filter_value(E, static_cast<int>(spec_.tau)) * std::exp(-log_shift_);
            return power == 2 ? scaled * scaled : scaled;
        }
        const double lf = detail::log_filter_value(spec_, E);
        return std::exp(power * (lf - log_shift_));
    }

  private:
    FilterSpec spec_;
    double log_shift_;
};

/// Largest log f(E_x) over the support of a distribution (or log max |f| for
/// Chebyshev). -inf when the filter vanishes on the whole support.
inline double support_max_log_filter(std::span<const double> dist, const DiagonalHamiltonian& h,
                                     const FilterSpec& spec) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t x = 0; x < dist.size(); ++x) {
        if (dist[x] <= 0.0) continue;
        const double E = h.energy(x);
        if (spec.family == FilterFamily::Chebyshev) {
            detail::check_filter_domain(spec.family, E);
            const double f = std::abs(chebyshev_filter_value(E, static_cast<int>(spec.tau)));
            if (f > 0.0) best = std::max(best, std::log(f));
        } else {
            best = std::max(best, detail::log_filter_value(spec, E));
        }
    }
    return best;
}

inline double support_max_log_filter(const SampleSet& samples, const DiagonalHamiltonian& h,
                                     const FilterSpec& spec) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [x, count] : samples.counts) {
        if (count == 0) continue;
        const double E = h.energy(x);
        if (spec.family == FilterFamily::Chebyshev) {
            detail::check_filter_domain(spec.family, E);
            const double f = std::abs(chebyshev_filter_value(E, static_cast<int>(spec.tau)));
            if (f > 0.0) best = std::max(best, std::log(f));
        } else {
            best = std::max(best, detail::log_filter_value(spec, E));
        }
    }
    return best;
}

/// sum_x P(x) (f(E_x)/s)^power for the shifted filter.
inline double shifted_moment(std::span<const double> dist, const DiagonalHamiltonian& h,
                             const ScaledFilter& filter, int power) {
    double sum = 0.0;
    for (std::uint64_t x = 0; x < dist.size(); ++x) {
        if (dist[x] > 0.0) sum += dist[x] * filter.value_pow(h.energy(x), power);
    }
    return sum;
}

/// (1/M) sum_x M_x (f(E_x)/s)^power.
inline double shifted_moment(const SampleSet& samples, const DiagonalHamiltonian& h,
                             const ScaledFilter& filter, int power) {
    if (samples.total == 0) throw ValidationError("empty sample set");
    double sum = 0.0;
    for (const auto& [x, count] : samples.counts) {
        sum += static_cast<double>(count) * filter.value_pow(h.energy(x), power);
    }
    return sum / static_cast<double>(samples.total);
}

/// Monte-Carlo estimator (1/M) sum_x M_x f^power(E_x; tau), stabilized by
/// factoring out the largest sampled filter value. The true value can still
/// overflow to +inf for extreme tau; ratios of these estimates do not, which
/// is why the optimizers work with ScaledFilter directly.
inline double estimate_expectation(const SampleSet& samples, const DiagonalHamiltonian& h,
                                   const FilterSpec& spec, int power) {
    if (samples.total == 0) throw ValidationError("empty sample set");
    const double shift = support_max_log_filter(samples, h, spec);
    if (shift == -std::numeric_limits<double>::infinity()) return 0.0;
    const ScaledFilter filter(spec, shift);
    return std::exp(power * shift) * shifted_moment(samples, h, filter, power);
}

/// Exact-mode variant: sum_x P(x) f^power(E_x; tau).
inline double estimate_expectation(std::span<const double> dist, const DiagonalHamiltonian& h,
                                   const FilterSpec& spec, int power) {
    validate_distribution(dist);
    const double shift = support_max_log_filter(dist, h, spec);
    if (shift == -std::numeric_limits<double>::infinity()) return 0.0;
    const ScaledFilter filter(spec, shift);
    return std::exp(power * shift) * shifted_moment(dist, h, filter, power);
}

/// Average energy from the same samples used for the filter moments.
inline double estimate_energy(const SampleSet& samples, const DiagonalHamiltonian& h) {
    if (samples.total == 0) throw ValidationError("empty sample set");
    double sum = 0.0;
    for (const auto& [x, count] : samples.counts) {
        sum += static_cast<double>(count) * h.energy(x);
    }
    return sum / static_cast<double>(samples.total);
}

inline double estimate_energy(std::span<const double> dist, const DiagonalHamiltonian& h) {
    double sum = 0.0;
    for (std::uint64_t x = 0; x < dist.size(); ++x) {
        if (dist[x] > 0.0) sum += dist[x] * h.energy(x);
    }
    return sum;
}

/// Exactly filtered distribution: P'(x) = f^2(E_x) P(x) / sum_y f^2(E_y) P(y).
inline std::vector<double> filtered_distribution(std::span<const double> dist,
                                                 const DiagonalHamiltonian& h,
                                                 const FilterSpec& spec) {
    validate_distribution(dist);
    const double shift = support_max_log_filter(dist, h, spec);
    if (shift == -std::numeric_limits<double>::infinity()) {
        throw DegenerateFilterError("filter vanishes on the entire support");
    }
    const ScaledFilter filter(spec, shift);
    std::vector<double> out(dist.size(), 0.0);
    double norm = 0.0;
    for (std::uint64_t x = 0; x < dist.size(); ++x) {
        if (dist[x] <= 0.0) continue;
        out[x] = dist[x] * filter.value_pow(h.energy(x), 2);
        norm += out[x];
    }
    if (!(norm > 0.0)) throw DegenerateFilterError("filtered distribution has zero mass");
    for (double& p : out) p /= norm;
    return out;
}

/// Numeric check that f^2 strictly decreases on [lo, hi]. The Chebyshev
/// expansion oscillates for some orders, so callers verify per tau and warn
/// instead of assuming.
inline bool filter_squared_strictly_decreasing(const FilterSpec& spec, double lo, double hi,
                                               int grid_points = 256) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid_points; ++i) {
        const double E = lo + (hi - lo) * i / grid_points;
        double f;
        if (spec.family == FilterFamily::Chebyshev) {
            f = chebyshev_filter_value(E, static_cast<int>(spec.tau));
        } else {
            f = std::exp(detail::log_filter_value(spec, E));
        }
        const double f2 = f * f;
        if (i > 0 && !(f2 < prev)) return false;
        prev = f2;
    }
    return true;
}

}  // namespace fvqe
