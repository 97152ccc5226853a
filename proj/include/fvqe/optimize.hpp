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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fvqe/ansatz.hpp"
#include "fvqe/causal_cone.hpp"
#include "fvqe/circuit.hpp"
#include "fvqe/common.hpp"
#include "fvqe/filters.hpp"
#include "fvqe/hadamard_test.hpp"
#include "fvqe/hamiltonian.hpp"
#include "fvqe/sampling.hpp"
#include "fvqe/statevector.hpp"

namespace fvqe {

enum class Algorithm { FVQE, QVF, VQE, QAOA, HEITE };

inline std::string to_string(Algorithm alg) {
    switch (alg) {
        case Algorithm::FVQE: return "fvqe";
        case Algorithm::QVF: return "qvf";
        case Algorithm::VQE: return "vqe";
        case Algorithm::QAOA: return "qaoa";
        case Algorithm::HEITE: return "heite";
    }
    return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "fvqe") return Algorithm::FVQE;
    if (s == "qvf") return Algorithm::QVF;
    if (s == "vqe") return Algorithm::VQE;
    if (s == "qaoa") return Algorithm::QAOA;
    if (s == "heite") return Algorithm::HEITE;
    throw ValidationError("unknown algorithm: " + s);
}

enum class LearningRateMode { InverseHessianDiagonal, Fixed };

inline std::string to_string(LearningRateMode mode) {
    return mode == LearningRateMode::InverseHessianDiagonal ? "inverse_hessian_diagonal" : "fixed";
}

inline LearningRateMode learning_rate_mode_from_string(const std::string& s) {
    if (s == "inverse_hessian_diagonal") return LearningRateMode::InverseHessianDiagonal;
    if (s == "fixed") return LearningRateMode::Fixed;
    throw ValidationError("unknown learning rate mode: " + s);
}

struct OptimizerConfig {
    Algorithm algorithm = Algorithm::FVQE;
    FilterSpec filter{FilterFamily::Inverse, 1.0};  // family for FVQE; fixed tau for QVF
    int steps = 70;
    std::uint64_t shots = 0;  // 0 = exact mode
    std::uint64_t seed = 0;
    int layers = 1;

    // tau adaptation (FVQE): solve g(tau) = g_c to the stated window.
    double gradient_norm_threshold = 0.1;  // g_c
    double tau_window = 0.01;              // accept 0 < g_c - g(tau) < tau_window
    double tau_initial = 0.1;
    double tau_growth = 2.0;
    double plateau_tol = 1e-3;     // relative change over two growth steps
    int tau_growth_budget = 30;
    int tau_bisection_budget = 40;

    LearningRateMode lr_mode = LearningRateMode::InverseHessianDiagonal;
    double eta = 1.0;            // fixed learning rate value
    double hessian_guard = 1e-8; // |Hessian diagonal| below this falls back to eta = 1

    int qvf_inner_iterations = 20;
    double qvf_inner_eta = 0.5;

    double heite_tau = 1.0;  // fixed imaginary time step

    void validate() const {
        if (steps < 1) throw ValidationError("optimizer needs at least 1 step");
        if (!(gradient_norm_threshold > 0.0)) throw ValidationError("g_c must be positive");
        if (layers < 1) throw ValidationError("ansatz needs at least 1 layer");
    }
};

struct StepRecord {
    int t = 0;
    double tau = 0.0;
    double grad_norm = 0.0;
    double energy = 0.0;
    double approx_ratio = 0.0;
    double gs_prob = 0.0;
    std::uint64_t circuits = 0;
    std::uint64_t shots = 0;
    std::vector<double> params;
    bool plateau_branch = false;
    bool tau_window_hit = false;
    int tau_search_evals = 0;
};

struct OptimizerTrace {
    std::vector<StepRecord> steps;  // index 0 records the initial state
    bool completed = true;
    std::string abort_reason;
    std::uint64_t total_circuits = 0;
    std::uint64_t total_shots = 0;
    std::map<int, std::uint64_t> cone_width_histogram;  // HE-ITE only
    bool filter_monotonicity_warning = false;

    /// CSV trace, one row per step.
    void write_csv(std::ostream& out) const {
        out << "t,tau,grad_norm,energy,approx_ratio,gs_prob,circuits,shots\n";
        for (const auto& s : steps) {
            out << s.t << ',' << format_double(s.tau) << ',' << format_double(s.grad_norm) << ','
                << format_double(s.energy) << ',' << format_double(s.approx_ratio) << ','
                << format_double(s.gs_prob) << ',' << s.circuits << ',' << s.shots << '\n';
        }
    }

    double final_approx_ratio() const {
        return steps.empty() ? 0.0 : steps.back().approx_ratio;
    }
};

namespace detail {

/// Exact distribution or shot samples for one prepared circuit.
struct CircuitEstimate {
    std::vector<double> dist;
    SampleSet samples;
    bool exact = true;

    double max_log_f(const DiagonalHamiltonian& h, const FilterSpec& spec) const {
        return exact ? support_max_log_filter(std::span<const double>(dist), h, spec)
                     : support_max_log_filter(samples, h, spec);
    }

    double moment(const DiagonalHamiltonian& h, const ScaledFilter& f, int power) const {
        return exact ? shifted_moment(std::span<const double>(dist), h, f, power)
                     : shifted_moment(samples, h, f, power);
    }

    double energy_mean(const DiagonalHamiltonian& h) const {
        return exact ? estimate_energy(std::span<const double>(dist), h) : estimate_energy(samples, h);
    }

    double prob_of(std::uint64_t x) const {
        if (exact) return x < dist.size() ? dist[x] : 0.0;
        const auto it = samples.counts.find(x);
        if (it == samples.counts.end()) return 0.0;
        return static_cast<double>(it->second) / static_cast<double>(samples.total);
    }

    double mean_cost(const MaxCutProblem& problem) const {
        double sum = 0.0;
        if (exact) {
            for (std::uint64_t x = 0; x < dist.size(); ++x) {
                if (dist[x] > 0.0) sum += dist[x] * problem.cost(x);
            }
            return sum;
        }
        for (const auto& [x, count] : samples.counts) {
            sum += static_cast<double>(count) * problem.cost(x);
        }
        return sum / static_cast<double>(samples.total);
    }
};

inline CircuitEstimate estimate_circuit(const Circuit& circuit, std::span<const double> params,
                                        std::uint64_t shots, std::uint64_t seed) {
    CircuitEstimate est;
    const StateVector state = simulate(circuit, params);
    if (shots == 0) {
        est.exact = true;
        est.dist = state.probabilities();
    } else {
        est.exact = false;
        est.samples = sample(state, shots, seed);
    }
    return est;
}

/// Batched variant over the batch-evaluation interface; the estimates come
/// back in input order with one sampling seed per circuit.
inline std::vector<CircuitEstimate> estimate_circuits(
    const Circuit& circuit, const std::vector<std::vector<double>>& params_list,
    std::uint64_t shots, const std::vector<std::uint64_t>& seeds) {
    const auto states = simulate_batch(circuit, params_list);
    std::vector<CircuitEstimate> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (shots == 0) {
            out[i].exact = true;
            out[i].dist = states[i].probabilities();
        } else {
            out[i].exact = false;
            out[i].samples = sample(states[i], shots, seeds[i]);
        }
    }
    return out;
}

/// The 2m (+pi/2, -pi/2) shift vectors around theta, with their per-circuit
/// seeds derived from the provided tag maker.
template <typename SeedFn>
std::vector<CircuitEstimate> estimate_parameter_shifts(const Circuit& circuit,
                                                       const std::vector<double>& theta,
                                                       std::uint64_t shots, SeedFn&& seed_of) {
    const std::size_t m = static_cast<std::size_t>(circuit.param_count);
    std::vector<std::vector<double>> params_list;
    std::vector<std::uint64_t> seeds;
    params_list.reserve(2 * m);
    seeds.reserve(2 * m);
    std::vector<double> params = theta;
    for (std::size_t j = 0; j < m; ++j) {
        for (const double sign : {+1.0, -1.0}) {
            params[j] = theta[j] + sign * std::numbers::pi / 2.0;
            params_list.push_back(params);
            seeds.push_back(seed_of(2 * j + (sign < 0)));
        }
        params[j] = theta[j];
    }
    return estimate_circuits(circuit, params_list, shots, seeds);
}

struct GradientAtTau {
    std::vector<double> grad;
    double norm = 0.0;
    double filter_mean = 0.0;     // <F~> on psi, common scale
    double filter_sq_mean = 0.0;  // <F~^2> on psi
    double log_shift = 0.0;
    bool finite = true;
};

/// Eq.-(6)-style gradient from cached circuit estimates, re-weighted for a
/// candidate tau. All moments share one scale so the ratios are exact.
inline GradientAtTau gradient_for_tau(FilterFamily family, double tau,
                                      const CircuitEstimate& psi,
                                      const std::vector<CircuitEstimate>& shifted,
                                      const DiagonalHamiltonian& h) {
    const FilterSpec spec(family, tau);
    GradientAtTau result;
    result.log_shift = psi.max_log_f(h, spec);
    if (result.log_shift == -std::numeric_limits<double>::infinity()) {
        throw DegenerateFilterError("filter vanishes on all sampled states");
    }
    const ScaledFilter filter(spec, result.log_shift);
    result.filter_sq_mean = psi.moment(h, filter, 2);
    if (!(result.filter_sq_mean > 0.0) || !std::isfinite(result.filter_sq_mean)) {
        throw DegenerateFilterError("<F^2> estimate is not positive");
    }
    result.filter_mean = psi.moment(h, filter, 1);
    const double denom = 4.0 * std::sqrt(result.filter_sq_mean);
    const std::size_t m = shifted.size() / 2;
    result.grad.resize(m);
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double plus = shifted[2 * j].moment(h, filter, 1);
        const double minus = shifted[2 * j + 1].moment(h, filter, 1);
        const double g = -(plus - minus) / denom;
        result.grad[j] = g;
        norm_sq += g * g;
        if (!std::isfinite(g)) result.finite = false;
    }
    result.norm = std::sqrt(norm_sq);
    if (!std::isfinite(result.norm)) result.finite = false;
    return result;
}

struct TauChoice {
    double tau = 0.0;
    GradientAtTau gradient;
    bool plateau_branch = false;
    bool window_hit = false;
    int evaluations = 0;
};

/// Two-phase search for g(tau_t) = g_c: grow tau geometrically until the
/// norm exceeds g_c, then bisect down to the acceptance window
/// 0 < g_c - g(tau) < window; if the norm plateaus first, return the tried
/// tau whose norm is closest below the threshold. Chebyshev only admits
/// integers and uses a linear scan with the same acceptance rule. The
/// candidate norms are re-weightings of one fixed set of circuit estimates,
/// so the search costs no additional circuit evaluations.
inline TauChoice adapt_tau(FilterFamily family, const CircuitEstimate& psi,
                           const std::vector<CircuitEstimate>& shifted,
                           const DiagonalHamiltonian& h, const OptimizerConfig& config) {
    const double g_c = config.gradient_norm_threshold;
    TauChoice choice;

    struct Tried {
        double tau;
        double norm;
        GradientAtTau grad;
    };
    std::vector<Tried> tried;

    const auto eval = [&](double tau) -> double {
        auto g = gradient_for_tau(family, tau, psi, shifted, h);
        ++choice.evaluations;
        const double norm = g.finite ? g.norm : std::numeric_limits<double>::infinity();
        tried.push_back({tau, norm, std::move(g)});
        return norm;
    };

    const auto pick_best_below = [&]() -> Tried* {
        Tried* best = nullptr;
        for (auto& t : tried) {
            if (!std::isfinite(t.norm) || t.norm > g_c) continue;
            if (!best || t.norm > best->norm ||
                (t.norm == best->norm && t.tau < best->tau)) {
                best = &t;
            }
        }
        return best;
    };

    const auto in_window = [&](double norm) {
        return norm < g_c && (g_c - norm) < config.tau_window;
    };

    const auto finish = [&](Tried& t, bool plateau) {
        choice.tau = t.tau;
        choice.gradient = std::move(t.grad);
        choice.plateau_branch = plateau;
        choice.window_hit = in_window(choice.gradient.norm);
        return choice;
    };

    if (family == FilterFamily::Chebyshev) {
        double prev = -1.0, prev2 = -1.0;
        for (int tau = 1; tau <= config.tau_growth_budget; ++tau) {
            const double norm = eval(static_cast<double>(tau));
            if (norm > g_c) break;
            if (tau >= 3) {
                const double r1 = std::abs(norm - prev) / std::max(std::abs(prev), 1e-12);
                const double r2 = std::abs(prev - prev2) / std::max(std::abs(prev2), 1e-12);
                if (r1 < config.plateau_tol && r2 < config.plateau_tol) break;
            }
            prev2 = prev;
            prev = norm;
        }
        Tried* best = pick_best_below();
        if (!best) throw TauAdaptationError("no integer tau with gradient norm below threshold");
        return finish(*best, true);
    }

    double tau = config.tau_initial;
    double upper = -1.0;
    double prev = -1.0, prev2 = -1.0;
    for (int i = 0; i < config.tau_growth_budget; ++i) {
        const double norm = eval(tau);
        if (norm > g_c) {
            upper = tau;
            break;
        }
        if (in_window(norm)) return finish(tried.back(), false);
        if (i >= 2) {
            const double r1 = std::abs(norm - prev) / std::max(std::abs(prev), 1e-12);
            const double r2 = std::abs(prev - prev2) / std::max(std::abs(prev2), 1e-12);
            if (r1 < config.plateau_tol && r2 < config.plateau_tol) {
                Tried* best = pick_best_below();
                if (!best) throw TauAdaptationError("gradient norm plateaued with no usable tau");
                return finish(*best, true);
            }
        }
        prev2 = prev;
        prev = norm;
        tau *= config.tau_growth;
    }

    if (upper < 0.0) {  // growth budget exhausted below the threshold
        Tried* best = pick_best_below();
        if (!best) throw TauAdaptationError("tau search found no norm below the threshold");
        return finish(*best, true);
    }

    double lo = upper / config.tau_growth;  // last tau below threshold (or 0 on first hit)
    if (tried.size() == 1) lo = 0.0;
    double hi = upper;
    for (int i = 0; i < config.tau_bisection_budget; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double norm = eval(mid);
        if (norm > g_c) {
            hi = mid;
        } else {
            lo = mid;
            if (in_window(norm)) return finish(tried.back(), false);
        }
    }
    Tried* best = pick_best_below();
    if (!best) throw TauAdaptationError("bisection found no tau with norm below the threshold");
    return finish(*best, true);
}

}  // namespace detail

/// Result of one Eq.-(6) gradient evaluation at theta_{t-1}: the gradient,
/// its norm, and the psi_{t-1} moments (common-scale <F>, <F^2> plus the
/// average energy from the same samples).
struct FvqeGradient {
    std::vector<double> grad;
    double norm = 0.0;
    double filter_mean = 0.0;
    double filter_sq_mean = 0.0;
    double energy_mean = 0.0;
    double log_shift = 0.0;
};

/// All diagonal Hessian entries of the step-t cost coincide:
/// <F>_psi / (4 sqrt(<F^2>_psi)); scale-invariant, so the common-scale
/// moments can be used directly.
inline double hessian_diagonal_fvqe(double filter_mean, double filter_sq_mean) {
    if (!(filter_sq_mean > 0.0)) throw DegenerateFilterError("<F^2> must be positive");
    return filter_mean / (4.0 * std::sqrt(filter_sq_mean));
}

/// Standalone Eq.-(6) gradient: 2m+1 circuit evaluations (psi_{t-1} plus the
/// +-pi/2 shifts of every slot).
inline FvqeGradient fvqe_gradient(const std::vector<double>& theta_prev, const FilterSpec& spec,
                                  const MaxCutProblem& problem, const Circuit& ansatz,
                                  std::uint64_t shots, std::uint64_t seed) {
    const auto psi = detail::estimate_circuit(ansatz, theta_prev, shots, derive_seed(seed, 0));
    const auto shifted = detail::estimate_parameter_shifts(
        ansatz, theta_prev, shots,
        [&](std::size_t idx) { return derive_seed(seed, 1 + idx); });
    auto at_tau = detail::gradient_for_tau(spec.family, spec.tau, psi, shifted,
                                           problem.hamiltonian);
    FvqeGradient result;
    result.grad = std::move(at_tau.grad);
    result.norm = at_tau.norm;
    result.filter_mean = at_tau.filter_mean;
    result.filter_sq_mean = at_tau.filter_sq_mean;
    result.log_shift = at_tau.log_shift;
    result.energy_mean = psi.energy_mean(problem.hamiltonian);
    return result;
}

/// Result of the per-step tau search.
struct TauAdaptation {
    double tau = 0.0;
    FvqeGradient gradient;
    bool plateau_branch = false;
    bool window_hit = false;
    int evaluations = 0;
};

/// Standalone tau adaptation at theta_prev: evaluates the 2m+1 circuits
/// once, then solves g(tau) = g_c by re-weighting those estimates (growth,
/// then bisection to the acceptance window, with the plateau fallback).
inline TauAdaptation adapt_tau(const std::vector<double>& theta_prev, FilterFamily family,
                               const MaxCutProblem& problem, const Circuit& ansatz,
                               double gradient_norm_threshold, std::uint64_t shots,
                               std::uint64_t seed) {
    OptimizerConfig config;
    config.gradient_norm_threshold = gradient_norm_threshold;
    const auto psi = detail::estimate_circuit(ansatz, theta_prev, shots, derive_seed(seed, 0));
    const auto shifted = detail::estimate_parameter_shifts(
        ansatz, theta_prev, shots,
        [&](std::size_t idx) { return derive_seed(seed, 1 + idx); });
    auto choice = detail::adapt_tau(family, psi, shifted, problem.hamiltonian, config);
    TauAdaptation result;
    result.tau = choice.tau;
    result.plateau_branch = choice.plateau_branch;
    result.window_hit = choice.window_hit;
    result.evaluations = choice.evaluations;
    result.gradient.grad = std::move(choice.gradient.grad);
    result.gradient.norm = choice.gradient.norm;
    result.gradient.filter_mean = choice.gradient.filter_mean;
    result.gradient.filter_sq_mean = choice.gradient.filter_sq_mean;
    result.gradient.log_shift = choice.gradient.log_shift;
    result.gradient.energy_mean = psi.energy_mean(problem.hamiltonian);
    return result;
}

namespace detail {

inline void record_metrics(StepRecord& row, const CircuitEstimate& psi,
                           const MaxCutProblem& problem) {
    row.energy = psi.energy_mean(problem.hamiltonian);
    row.approx_ratio = psi.mean_cost(problem) / problem.max_cost;
    row.gs_prob = psi.prob_of(problem.optimal_basis);
}

}  // namespace detail

namespace detail {

inline void check_widths(const MaxCutProblem& problem, const Circuit& circuit) {
    if (problem.hamiltonian.num_qubits() != circuit.width) {
        throw ValidationError("ansatz width does not match the problem qubit count");
    }
}

}  // namespace detail

/// F-VQE: per step, adapt tau to pin the gradient norm just below g_c, take
/// a single gradient-descent update with the quasi-Newton learning rate
/// 1/(Hessian diagonal), and log metrics from the same sample sets. A
/// degenerate filtered step is retried once with doubled shots before the
/// run aborts with a partial trace.
inline OptimizerTrace fvqe_run(const MaxCutProblem& problem, const HardwareEfficientAnsatz& ansatz,
                               const OptimizerConfig& config) {
    config.validate();
    detail::check_widths(problem, ansatz.circuit);
    const Circuit& circuit = ansatz.circuit;
    const std::size_t m = static_cast<std::size_t>(circuit.param_count);
    OptimizerTrace trace;

    std::vector<double> theta = initial_params_plus_state(ansatz);
    auto psi = detail::estimate_circuit(circuit, theta, config.shots,
                                        derive_seed(config.seed, 0, 0));
    {
        StepRecord row;
        row.t = 0;
        row.circuits = 1;
        row.shots = config.shots;
        row.params = theta;
        detail::record_metrics(row, psi, problem);
        trace.steps.push_back(std::move(row));
        trace.total_circuits += 1;
        trace.total_shots += config.shots;
    }

    for (int t = 1; t <= config.steps; ++t) {
        StepRecord row;
        row.t = t;
        bool step_done = false;
        for (int attempt = 0; attempt < 2 && !step_done; ++attempt) {
            const std::uint64_t shots = config.shots << attempt;
            if (attempt > 0) {
                // Re-draw psi_{t-1} as well: its samples caused the failure.
                psi = detail::estimate_circuit(circuit, theta, shots,
                                               derive_seed(config.seed, t, 0, attempt));
                row.circuits += 1;
                row.shots += shots;
            }
            const auto shifted = detail::estimate_parameter_shifts(
                circuit, theta, shots, [&](std::size_t idx) {
                    return derive_seed(config.seed, t, 1 + idx, attempt);
                });
            row.circuits += 2 * m;
            row.shots += 2 * m * shots;

            try {
                auto choice = detail::adapt_tau(config.filter.family, psi, shifted,
                                                problem.hamiltonian, config);
                row.tau = choice.tau;
                row.grad_norm = choice.gradient.norm;
                row.plateau_branch = choice.plateau_branch;
                row.tau_window_hit = choice.window_hit;
                row.tau_search_evals = choice.evaluations;

                if (config.filter.family == FilterFamily::Chebyshev &&
                    !filter_squared_strictly_decreasing(FilterSpec(config.filter.family, choice.tau),
                                                        0.0, 1.0)) {
                    trace.filter_monotonicity_warning = true;
                }

                double eta = config.eta;
                if (config.lr_mode == LearningRateMode::InverseHessianDiagonal) {
                    const double hess = hessian_diagonal_fvqe(choice.gradient.filter_mean,
                                                              choice.gradient.filter_sq_mean);
                    eta = std::abs(hess) < config.hessian_guard ? 1.0 : 1.0 / hess;
                }
                for (std::size_t j = 0; j < m; ++j) theta[j] -= eta * choice.gradient.grad[j];
                step_done = true;
            } catch (const DegenerateFilterError& err) {
                if (config.shots == 0 || attempt == 1) {
                    trace.completed = false;
                    trace.abort_reason = err.what();
                    trace.total_circuits += row.circuits;
                    trace.total_shots += row.shots;
                    return trace;
                }
            } catch (const TauAdaptationError& err) {
                trace.completed = false;
                trace.abort_reason = err.what();
                trace.total_circuits += row.circuits;
                trace.total_shots += row.shots;
                return trace;
            }
        }

        const std::uint64_t shots = config.shots;
        psi = detail::estimate_circuit(circuit, theta, shots, derive_seed(config.seed, t, 0, 0));
        row.circuits += 1;
        row.shots += shots;
        row.params = theta;
        detail::record_metrics(row, psi, problem);
        trace.total_circuits += row.circuits;
        trace.total_shots += row.shots;
        trace.steps.push_back(std::move(row));
    }
    return trace;
}

/// Parameter-shift VQE gradient of <H>.
inline std::vector<double> vqe_gradient(const std::vector<double>& theta,
                                        const MaxCutProblem& problem, const Circuit& ansatz,
                                        std::uint64_t shots, std::uint64_t seed) {
    const std::size_t m = static_cast<std::size_t>(ansatz.param_count);
    const auto shifted = detail::estimate_parameter_shifts(
        ansatz, theta, shots, [&](std::size_t idx) { return derive_seed(seed, idx); });
    std::vector<double> grad(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        grad[j] = 0.5 * (shifted[2 * j].energy_mean(problem.hamiltonian) -
                         shifted[2 * j + 1].energy_mean(problem.hamiltonian));
    }
    return grad;
}

/// Second derivative of <H> with respect to one parameter:
/// 1/2 <H>_{theta + pi e_j} - 1/2 <H>_theta. Available but not used for the
/// learning rate by default (the diagonal entries frequently vanish, which
/// makes the quasi-Newton update diverge).
inline double vqe_hessian_diagonal(const std::vector<double>& theta, std::size_t j,
                                   const MaxCutProblem& problem, const Circuit& ansatz,
                                   std::uint64_t shots, std::uint64_t seed) {
    std::vector<double> params = theta;
    const auto base = detail::estimate_circuit(ansatz, params, shots, derive_seed(seed, 0));
    params[j] = theta[j] + std::numbers::pi;
    const auto shifted = detail::estimate_circuit(ansatz, params, shots, derive_seed(seed, 1));
    return 0.5 * shifted.energy_mean(problem.hamiltonian) -
           0.5 * base.energy_mean(problem.hamiltonian);
}

/// Gradient descent on <H> with a fixed learning rate (eta = 1 by default).
inline OptimizerTrace vqe_run(const MaxCutProblem& problem, const HardwareEfficientAnsatz& ansatz,
                              const OptimizerConfig& config) {
    config.validate();
    detail::check_widths(problem, ansatz.circuit);
    const Circuit& circuit = ansatz.circuit;
    const std::size_t m = static_cast<std::size_t>(circuit.param_count);
    OptimizerTrace trace;

    std::vector<double> theta = initial_params_plus_state(ansatz);
    auto psi = detail::estimate_circuit(circuit, theta, config.shots,
                                        derive_seed(config.seed, 0, 0));
    {
        StepRecord row;
        row.t = 0;
        row.circuits = 1;
        row.shots = config.shots;
        row.params = theta;
        detail::record_metrics(row, psi, problem);
        trace.steps.push_back(std::move(row));
        trace.total_circuits += 1;
        trace.total_shots += config.shots;
    }

    for (int t = 1; t <= config.steps; ++t) {
        StepRecord row;
        row.t = t;
        const auto grad =
            vqe_gradient(theta, problem, circuit, config.shots, derive_seed(config.seed, t, 1));
        row.circuits += 2 * m;
        row.shots += 2 * m * config.shots;
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            theta[j] -= config.eta * grad[j];
            norm_sq += grad[j] * grad[j];
        }
        row.grad_norm = std::sqrt(norm_sq);

        psi = detail::estimate_circuit(circuit, theta, config.shots,
                                       derive_seed(config.seed, t, 0));
        row.circuits += 1;
        row.shots += config.shots;
        row.params = theta;
        detail::record_metrics(row, psi, problem);
        trace.total_circuits += row.circuits;
        trace.total_shots += row.shots;
        trace.steps.push_back(std::move(row));
    }
    return trace;
}

namespace detail {

inline CircuitEstimate estimate_qaoa_state(const DiagonalHamiltonian& h,
                                           std::span<const double> gamma,
                                           std::span<const double> beta, std::uint64_t shots,
                                           std::uint64_t seed) {
    CircuitEstimate est;
    const StateVector state = build_qaoa_state(h, gamma, beta);
    if (shots == 0) {
        est.exact = true;
        est.dist = state.probabilities();
    } else {
        est.exact = false;
        est.samples = sample(state, shots, seed);
    }
    return est;
}

}  // namespace detail

/// QAOA baseline: analytical gradient descent on <H> with eta = 1 and
/// random [0, pi] initial parameters.
inline OptimizerTrace qaoa_run(const MaxCutProblem& problem, int p, const OptimizerConfig& config) {
    config.validate();
    const DiagonalHamiltonian& h = problem.hamiltonian;
    const int n = h.num_qubits();
    const std::size_t num_terms = h.terms().size();
    OptimizerTrace trace;

    std::vector<double> params = qaoa_initial_params(p, config.seed);
    const auto gamma_of = [&](const std::vector<double>& v) {
        return std::span<const double>(v.data(), static_cast<std::size_t>(p));
    };
    const auto beta_of = [&](const std::vector<double>& v) {
        return std::span<const double>(v.data() + p, static_cast<std::size_t>(p));
    };

    auto psi = detail::estimate_qaoa_state(h, gamma_of(params), beta_of(params), config.shots,
                                           derive_seed(config.seed, 0, 0));
    {
        StepRecord row;
        row.t = 0;
        row.circuits = 1;
        row.shots = config.shots;
        row.params = params;
        detail::record_metrics(row, psi, problem);
        trace.steps.push_back(std::move(row));
        trace.total_circuits += 1;
        trace.total_shots += config.shots;
    }

    for (int t = 1; t <= config.steps; ++t) {
        StepRecord row;
        row.t = t;
        std::uint64_t evals = 0;
        const Measurement meas{config.shots, derive_seed(config.seed, t, 1)};
        const auto grad = qaoa_gradient(h, gamma_of(params), beta_of(params), meas, &evals);
        row.circuits += evals;
        row.shots += evals * config.shots;
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < params.size(); ++j) {
            params[j] -= config.eta * grad[j];
            norm_sq += grad[j] * grad[j];
        }
        row.grad_norm = std::sqrt(norm_sq);

        psi = detail::estimate_qaoa_state(h, gamma_of(params), beta_of(params), config.shots,
                                          derive_seed(config.seed, t, 0));
        row.circuits += 1;
        row.shots += config.shots;
        row.params = params;
        detail::record_metrics(row, psi, problem);
        trace.total_circuits += row.circuits;
        trace.total_shots += row.shots;
        trace.steps.push_back(std::move(row));
        (void)num_terms;
        (void)n;
    }
    return trace;
}

/// One QVF step: minimize C_t(theta) = 1 - Re<psi_{t-1}|F|psi(theta)> /
/// sqrt(<F^2>_{psi_{t-1}}) by gradient descent, with every overlap evaluated
/// through the Hadamard test (the Eq.-(5) form is valid at arbitrary theta).
struct QvfStepResult {
    std::vector<double> theta;
    double achieved_cost = 0.0;
    bool converged = false;
    int inner_iterations = 0;
    std::uint64_t circuits = 0;
};

inline QvfStepResult qvf_step(const MaxCutProblem& problem,
                              const HardwareEfficientAnsatz& ansatz,
                              const std::vector<double>& theta_prev, const FilterSpec& spec,
                              const OptimizerConfig& config, std::uint64_t step_tag = 0) {
    const Circuit& circuit = ansatz.circuit;
    const std::size_t m = static_cast<std::size_t>(circuit.param_count);
    const DiagonalHamiltonian& h = problem.hamiltonian;
    QvfStepResult result;

    auto psi = detail::estimate_circuit(circuit, theta_prev, config.shots,
                                        derive_seed(config.seed, step_tag, 0));
    result.circuits += 1;
    const double shift = psi.max_log_f(h, spec);
    if (shift == -std::numeric_limits<double>::infinity()) {
        throw DegenerateFilterError("filter vanishes on all sampled states");
    }
    const ScaledFilter filter(spec, shift);
    const double f2 = psi.moment(h, filter, 2);
    if (!(f2 > 0.0)) throw DegenerateFilterError("<F^2> estimate is not positive");
    const double denom = std::sqrt(f2);

    const auto overlap = [&](const std::vector<double>& theta, std::uint64_t tag) {
        const Circuit w = build_overlap_test_circuit(circuit, theta, theta_prev);
        const Measurement meas{config.shots, derive_seed(config.seed, step_tag, tag)};
        result.circuits += 1;
        return shifted_overlap_expectation(w, h, filter, meas);
    };

    std::vector<double> theta = theta_prev;
    const auto cost_of = [&](const std::vector<double>& th, std::uint64_t tag) {
        return 1.0 - overlap(th, tag) / denom;
    };

    double best_cost = cost_of(theta, 1);
    std::vector<double> best_theta = theta;
    double last_grad_norm = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= config.qvf_inner_iterations; ++it) {
        std::vector<double> grad(m, 0.0);
        std::vector<double> probe = theta;
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            probe[j] = theta[j] + std::numbers::pi;
            grad[j] = -overlap(probe, 100 + 2 * m * it + j) / (2.0 * denom);
            probe[j] = theta[j];
            norm_sq += grad[j] * grad[j];
        }
        last_grad_norm = std::sqrt(norm_sq);
        for (std::size_t j = 0; j < m; ++j) theta[j] -= config.qvf_inner_eta * grad[j];
        const double cost = cost_of(theta, 2 + it);
        result.inner_iterations = it;
        if (cost < best_cost) {
            best_cost = cost;
            best_theta = theta;
        }
        if (last_grad_norm < 1e-3) break;
    }
    result.theta = best_theta;
    result.achieved_cost = best_cost;
    result.converged = last_grad_norm < 1e-3;
    return result;
}

/// QVF loop: T steps of qvf_step at a fixed filter strength.
inline OptimizerTrace qvf_run(const MaxCutProblem& problem, const HardwareEfficientAnsatz& ansatz,
                              const OptimizerConfig& config) {
    config.validate();
    detail::check_widths(problem, ansatz.circuit);
    OptimizerTrace trace;
    std::vector<double> theta = initial_params_plus_state(ansatz);

    auto psi = detail::estimate_circuit(ansatz.circuit, theta, config.shots,
                                        derive_seed(config.seed, 0, 0));
    {
        StepRecord row;
        row.t = 0;
        row.circuits = 1;
        row.shots = config.shots;
        row.params = theta;
        detail::record_metrics(row, psi, problem);
        trace.steps.push_back(std::move(row));
        trace.total_circuits += 1;
        trace.total_shots += config.shots;
    }

    for (int t = 1; t <= config.steps; ++t) {
        StepRecord row;
        row.t = t;
        row.tau = config.filter.tau;
        auto step = qvf_step(problem, ansatz, theta, config.filter, config,
                             static_cast<std::uint64_t>(t));
        theta = step.theta;
        row.circuits += step.circuits;
        row.shots += step.circuits * config.shots;

        psi = detail::estimate_circuit(ansatz.circuit, theta, config.shots,
                                       derive_seed(config.seed, t, 0));
        row.circuits += 1;
        row.shots += config.shots;
        row.params = theta;
        detail::record_metrics(row, psi, problem);
        trace.total_circuits += row.circuits;
        trace.total_shots += row.shots;
        trace.steps.push_back(std::move(row));
    }
    return trace;
}

namespace detail {

inline std::vector<int> mask_to_qubits(std::uint64_t mask, int width) {
    std::vector<int> qubits;
    for (int q = 0; q < width; ++q) {
        if (mask & (1ULL << (width - 1 - q))) qubits.push_back(q);
    }
    return qubits;
}

/// <prod Z over the cone support>, exact or sampled with the 2^(w+2)
/// shots-per-cone rule.
inline double heite_zbar(const CausalCone& cone, std::span<const double> params, bool exact,
                         std::uint64_t seed, std::uint64_t* circuits, std::uint64_t* shots) {
    double product = 1.0;
    std::uint64_t idx = 0;
    for (const auto& sub : cone.subcones) {
        const std::uint64_t sub_shots = exact ? 0 : (1ULL << (sub.width() + 2));
        const Measurement meas{sub_shots, derive_seed(seed, idx)};
        product *= subcone_zproduct(sub, params, cone.support, meas, idx);
        ++idx;
        if (circuits) ++*circuits;
        if (shots) *shots += sub_shots;
    }
    return product;
}

}  // namespace detail

/// Hardware-efficient imaginary time evolution. Each time step applies the
/// exact factorization exp(-tau H) = prod_k exp(-tau h_k Z_{Q_k}) (up to the
/// constant; everything commutes for a diagonal H) term by term: for term k
/// the single-term exponential filter is treated exactly like an F-VQE step,
/// except that the expectations are evaluated on the causal cone of Q_k and
/// only the parameters whose gates lie inside the cone are updated. Shot
/// mode uses 2^(n_cone + 2) measurement shots per cone circuit.
inline OptimizerTrace heite_run(const MaxCutProblem& problem, const HardwareEfficientAnsatz& ansatz,
                                const OptimizerConfig& config) {
    config.validate();
    detail::check_widths(problem, ansatz.circuit);
    const Circuit& circuit = ansatz.circuit;
    const DiagonalHamiltonian& h = problem.hamiltonian;
    const double tau = config.heite_tau;
    OptimizerTrace trace;

    struct TermCone {
        PauliZTerm term;
        CausalCone cone;
        std::vector<int> slots;
    };
    std::vector<TermCone> term_cones;
    for (const auto& term : h.terms()) {
        TermCone tc;
        tc.term = term;
        tc.cone = causal_cone(circuit, detail::mask_to_qubits(term.mask, circuit.width));
        tc.slots = tc.cone.all_slots();
        for (const auto& sub : tc.cone.subcones) {
            ++trace.cone_width_histogram[sub.width()];
        }
        term_cones.push_back(std::move(tc));
    }

    std::vector<double> theta = initial_params_plus_state(ansatz);
    auto psi = detail::estimate_circuit(circuit, theta, config.shots,
                                        derive_seed(config.seed, 0, 0));
    {
        StepRecord row;
        row.t = 0;
        row.circuits = 1;
        row.shots = config.shots;
        row.params = theta;
        detail::record_metrics(row, psi, problem);
        trace.steps.push_back(std::move(row));
        trace.total_circuits += 1;
        trace.total_shots += config.shots;
    }

    const bool exact = config.shots == 0;
    for (int t = 1; t <= config.steps; ++t) {
        StepRecord row;
        row.t = t;
        row.tau = tau;
        double step_norm_sq = 0.0;
        for (std::size_t k = 0; k < term_cones.size(); ++k) {
            const auto& tc = term_cones[k];
            const double th = tau * tc.term.coeff;
            const double ch = std::cosh(th), sh = std::sinh(th);
            const double ch2 = std::cosh(2.0 * th), sh2 = std::sinh(2.0 * th);

            const double zbar = detail::heite_zbar(
                tc.cone, theta, exact, derive_seed(config.seed, t, k, 0), &row.circuits,
                &row.shots);
            const double f1 = ch - sh * zbar;
            const double f2 = ch2 - sh2 * zbar;
            const double denom = 4.0 * std::sqrt(f2);

            std::vector<double> grad(tc.slots.size(), 0.0);
            std::vector<double> params = theta;
            for (std::size_t idx = 0; idx < tc.slots.size(); ++idx) {
                const std::size_t j = static_cast<std::size_t>(tc.slots[idx]);
                double diff = 0.0;
                for (const double sign : {+1.0, -1.0}) {
                    params[j] = theta[j] + sign * std::numbers::pi / 2.0;
                    const double z = detail::heite_zbar(
                        tc.cone, params, exact,
                        derive_seed(config.seed, t, k, 1 + 2 * idx + (sign < 0)), &row.circuits,
                        &row.shots);
                    diff += sign * (ch - sh * z);
                }
                params[j] = theta[j];
                grad[idx] = -diff / denom;
                step_norm_sq += grad[idx] * grad[idx];
            }

            double eta = config.eta;
            if (config.lr_mode == LearningRateMode::InverseHessianDiagonal) {
                const double hess = f1 / denom;
                eta = std::abs(hess) < config.hessian_guard ? 1.0 : 1.0 / hess;
            }
            for (std::size_t idx = 0; idx < tc.slots.size(); ++idx) {
                theta[static_cast<std::size_t>(tc.slots[idx])] -= eta * grad[idx];
            }
        }
        row.grad_norm = std::sqrt(step_norm_sq);

        psi = detail::estimate_circuit(circuit, theta, config.shots,
                                       derive_seed(config.seed, t, 0, 0));
        row.circuits += 1;
        row.shots += config.shots;
        row.params = theta;
        detail::record_metrics(row, psi, problem);
        trace.total_circuits += row.circuits;
        trace.total_shots += row.shots;
        trace.steps.push_back(std::move(row));
    }
    return trace;
}

}  // namespace fvqe
