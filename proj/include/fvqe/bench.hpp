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
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fvqe/common.hpp"
#include "fvqe/graph.hpp"
#include "fvqe/hamiltonian.hpp"
#include "fvqe/optimize.hpp"

namespace fvqe {

using Json = nlohmann::json;

inline Json to_json(const FilterSpec& spec) {
    return Json{{"family", to_string(spec.family)}, {"tau", spec.tau}};
}

inline FilterSpec filter_spec_from_json(const Json& j) {
    return FilterSpec(filter_family_from_string(j.at("family").get<std::string>()),
                      j.at("tau").get<double>());
}

/// One algorithm slot in an ensemble: a display name plus the optimizer
/// configuration template (per-run fields like seed, shots, and layers are
/// filled in by the runner).
struct AlgorithmEntry {
    std::string name;
    OptimizerConfig config;
    std::vector<int> only_sizes;  // empty = run on every configured size

    bool runs_at(int size) const {
        return only_sizes.empty() ||
               std::find(only_sizes.begin(), only_sizes.end(), size) != only_sizes.end();
    }
};

/// Ensemble configuration. The defaults bake in the reference settings:
/// 70 optimization steps, measurement shots 10/50/100/150/200 for
/// n = 5/7/9/11/13, one ansatz layer for HE-ITE and (n-1)/2 layers
/// otherwise, g_c = 0.1 with the inverse-Hessian learning rate for F-VQE,
/// and eta = 1 for VQE and QAOA.
struct RunConfig {
    std::vector<int> sizes{5, 7, 9};
    int instances_per_size = 10;
    bool exact = true;
    std::map<int, std::uint64_t> shots_per_size{{5, 10}, {7, 50}, {9, 100}, {11, 150}, {13, 200}};
    std::map<int, int> layers_per_size{{5, 2}, {7, 3}, {9, 4}, {11, 5}, {13, 6}};
    std::vector<AlgorithmEntry> algorithms;
    UpperBoundMode rescale_mode = UpperBoundMode::WeightSum;
    double ground_energy_floor = 1e-3;
    std::uint64_t master_seed = 2026;

    std::uint64_t shots_for(int n) const {
        const auto it = shots_per_size.find(n);
        if (it != shots_per_size.end()) return it->second;
        return 100;
    }

    int layers_for(int n, Algorithm alg) const {
        if (alg == Algorithm::HEITE) return 1;
        const auto it = layers_per_size.find(n);
        if (it != layers_per_size.end()) return it->second;
        return std::max(1, (n - 1) / 2);
    }
};

inline Json to_json(const OptimizerConfig& c) {
    Json j;
    j["algorithm"] = to_string(c.algorithm);
    j["filter"] = to_json(c.filter);
    j["steps"] = c.steps;
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    j["layers"] = c.layers;
    j["gradient_norm_threshold"] = c.gradient_norm_threshold;
    j["tau_window"] = c.tau_window;
    j["tau_initial"] = c.tau_initial;
    j["tau_growth"] = c.tau_growth;
    j["plateau_tol"] = c.plateau_tol;
    j["tau_growth_budget"] = c.tau_growth_budget;
    j["tau_bisection_budget"] = c.tau_bisection_budget;
    j["lr_mode"] = to_string(c.lr_mode);
    j["eta"] = c.eta;
    j["hessian_guard"] = c.hessian_guard;
    j["qvf_inner_iterations"] = c.qvf_inner_iterations;
    j["qvf_inner_eta"] = c.qvf_inner_eta;
    j["heite_tau"] = c.heite_tau;
    return j;
}

inline OptimizerConfig optimizer_config_from_json(const Json& j) {
    OptimizerConfig c;
    c.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    c.filter = filter_spec_from_json(j.at("filter"));
    c.steps = j.at("steps").get<int>();
    c.shots = j.at("shots").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.layers = j.at("layers").get<int>();
    c.gradient_norm_threshold = j.at("gradient_norm_threshold").get<double>();
    c.tau_window = j.at("tau_window").get<double>();
    c.tau_initial = j.at("tau_initial").get<double>();
    c.tau_growth = j.at("tau_growth").get<double>();
    c.plateau_tol = j.at("plateau_tol").get<double>();
    c.tau_growth_budget = j.at("tau_growth_budget").get<int>();
    c.tau_bisection_budget = j.at("tau_bisection_budget").get<int>();
    c.lr_mode = learning_rate_mode_from_string(j.at("lr_mode").get<std::string>());
    c.eta = j.at("eta").get<double>();
    c.hessian_guard = j.at("hessian_guard").get<double>();
    c.qvf_inner_iterations = j.at("qvf_inner_iterations").get<int>();
    c.qvf_inner_eta = j.at("qvf_inner_eta").get<double>();
    c.heite_tau = j.at("heite_tau").get<double>();
    return c;
}

inline Json to_json(const RunConfig& c) {
    Json j;
    j["sizes"] = c.sizes;
    j["instances_per_size"] = c.instances_per_size;
    j["exact"] = c.exact;
    Json shots = Json::object();
    for (const auto& [n, m] : c.shots_per_size) shots[std::to_string(n)] = m;
    j["shots_per_size"] = shots;
    Json layers = Json::object();
    for (const auto& [n, p] : c.layers_per_size) layers[std::to_string(n)] = p;
    j["layers_per_size"] = layers;
    Json algos = Json::array();
    for (const auto& a : c.algorithms) {
        Json e;
        e["name"] = a.name;
        e["config"] = to_json(a.config);
        e["only_sizes"] = a.only_sizes;
        algos.push_back(e);
    }
    j["algorithms"] = algos;
    j["rescale_mode"] = to_string(c.rescale_mode);
    j["ground_energy_floor"] = c.ground_energy_floor;
    j["master_seed"] = c.master_seed;
    return j;
}

inline RunConfig run_config_from_json(const Json& j) {
    RunConfig c;
    c.sizes = j.at("sizes").get<std::vector<int>>();
    c.instances_per_size = j.at("instances_per_size").get<int>();
    c.exact = j.at("exact").get<bool>();
    c.shots_per_size.clear();
    for (const auto& [k, v] : j.at("shots_per_size").items()) {
        c.shots_per_size[std::stoi(k)] = v.get<std::uint64_t>();
    }
    c.layers_per_size.clear();
    for (const auto& [k, v] : j.at("layers_per_size").items()) {
        c.layers_per_size[std::stoi(k)] = v.get<int>();
    }
    c.algorithms.clear();
    for (const auto& e : j.at("algorithms")) {
        AlgorithmEntry a;
        a.name = e.at("name").get<std::string>();
        a.config = optimizer_config_from_json(e.at("config"));
        a.only_sizes = e.at("only_sizes").get<std::vector<int>>();
        c.algorithms.push_back(std::move(a));
    }
    c.rescale_mode = upper_bound_mode_from_string(j.at("rescale_mode").get<std::string>());
    c.ground_energy_floor = j.at("ground_energy_floor").get<double>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    return c;
}

inline AlgorithmEntry make_fvqe_entry(FilterFamily family, int steps = 70) {
    AlgorithmEntry a;
    a.name = "fvqe-" + to_string(family);
    a.config.algorithm = Algorithm::FVQE;
    a.config.filter.family = family;
    a.config.steps = steps;
    a.config.lr_mode = LearningRateMode::InverseHessianDiagonal;
    a.config.gradient_norm_threshold = 0.1;
    return a;
}

inline AlgorithmEntry make_vqe_entry(int steps = 70) {
    AlgorithmEntry a;
    a.name = "vqe";
    a.config.algorithm = Algorithm::VQE;
    a.config.steps = steps;
    a.config.lr_mode = LearningRateMode::Fixed;
    a.config.eta = 1.0;
    return a;
}

inline AlgorithmEntry make_qaoa_entry(int steps = 70) {
    AlgorithmEntry a;
    a.name = "qaoa";
    a.config.algorithm = Algorithm::QAOA;
    a.config.steps = steps;
    a.config.lr_mode = LearningRateMode::Fixed;
    a.config.eta = 1.0;
    return a;
}

inline AlgorithmEntry make_heite_entry(double tau, int steps) {
    std::ostringstream name;
    name << "heite-" << tau;
    AlgorithmEntry a;
    a.name = name.str();
    a.config.algorithm = Algorithm::HEITE;
    a.config.heite_tau = tau;
    a.config.steps = steps;
    a.config.lr_mode = LearningRateMode::InverseHessianDiagonal;
    return a;
}

/// Desk profile: exact mode, 10 instances at n in {5, 7, 9}, tractable in
/// minutes.
inline RunConfig desk_preset() {
    RunConfig c;
    c.sizes = {5, 7, 9};
    c.instances_per_size = 10;
    c.exact = true;
    c.algorithms = {make_fvqe_entry(FilterFamily::Inverse), make_vqe_entry(), make_qaoa_entry()};
    return c;
}

/// Full reference profile: 25 instances per size, the published shot schedule,
/// every filter family, the baselines, and HE-ITE (including the 23-qubit
/// cone-width study). Expect hours of runtime.
inline RunConfig paper_preset() {
    RunConfig c;
    c.sizes = {5, 7, 9, 11, 13, 23};
    c.instances_per_size = 25;
    c.exact = false;
    const std::vector<int> small_sizes{5, 7, 9, 11, 13};
    for (const auto family :
         {FilterFamily::Inverse, FilterFamily::Logarithm, FilterFamily::Exponential,
          FilterFamily::Power, FilterFamily::Cosine, FilterFamily::Chebyshev}) {
        auto e = make_fvqe_entry(family);
        e.only_sizes = small_sizes;
        c.algorithms.push_back(std::move(e));
    }
    auto vqe = make_vqe_entry();
    vqe.only_sizes = small_sizes;
    c.algorithms.push_back(std::move(vqe));
    auto qaoa = make_qaoa_entry();
    qaoa.only_sizes = small_sizes;
    c.algorithms.push_back(std::move(qaoa));
    c.algorithms.push_back(make_heite_entry(1.0, 70));
    return c;
}

struct RunId {
    int size = 0;
    int instance = 0;
    std::string algorithm;

    std::string stem() const {
        return "n" + std::to_string(size) + "_i" + std::to_string(instance) + "_" + algorithm;
    }
};

struct RunFailure {
    RunId id;
    std::string error;
};

struct AlgoSizeSummary {
    int size = 0;
    std::string algorithm;
    int instances = 0;
    int failures = 0;
    double mean_final_alpha = 0.0;
    double std_final_alpha = 0.0;
    std::vector<int> steps_to_threshold;  // per instance; -1 = never reached 0.75
    int median_steps_to_threshold = -1;   // upper median; -1 = fewer than half reached
    double fraction_gs_above_quarter = 0.0;
    std::map<int, std::uint64_t> cone_width_histogram;
};

struct EnsembleSummary {
    std::vector<AlgoSizeSummary> rows;
    int total_failures = 0;

    const AlgoSizeSummary* find(int size, const std::string& algorithm) const {
        for (const auto& r : rows) {
            if (r.size == size && r.algorithm == algorithm) return &r;
        }
        return nullptr;
    }
};

inline Json to_json(const EnsembleSummary& s) {
    Json rows = Json::array();
    for (const auto& r : s.rows) {
        Json j;
        j["size"] = r.size;
        j["algorithm"] = r.algorithm;
        j["instances"] = r.instances;
        j["failures"] = r.failures;
        j["mean_final_alpha"] = r.mean_final_alpha;
        j["std_final_alpha"] = r.std_final_alpha;
        j["steps_to_threshold"] = r.steps_to_threshold;
        j["median_steps_to_threshold"] = r.median_steps_to_threshold;
        j["fraction_gs_above_quarter"] = r.fraction_gs_above_quarter;
        Json hist = Json::object();
        for (const auto& [w, count] : r.cone_width_histogram) hist[std::to_string(w)] = count;
        j["cone_width_histogram"] = hist;
        rows.push_back(std::move(j));
    }
    return Json{{"rows", rows}, {"total_failures", s.total_failures}};
}

inline EnsembleSummary ensemble_summary_from_json(const Json& j) {
    EnsembleSummary s;
    s.total_failures = j.at("total_failures").get<int>();
    for (const auto& e : j.at("rows")) {
        AlgoSizeSummary r;
        r.size = e.at("size").get<int>();
        r.algorithm = e.at("algorithm").get<std::string>();
        r.instances = e.at("instances").get<int>();
        r.failures = e.at("failures").get<int>();
        r.mean_final_alpha = e.at("mean_final_alpha").get<double>();
        r.std_final_alpha = e.at("std_final_alpha").get<double>();
        r.steps_to_threshold = e.at("steps_to_threshold").get<std::vector<int>>();
        r.median_steps_to_threshold = e.at("median_steps_to_threshold").get<int>();
        r.fraction_gs_above_quarter = e.at("fraction_gs_above_quarter").get<double>();
        for (const auto& [k, v] : e.at("cone_width_histogram").items()) {
            r.cone_width_histogram[std::stoi(k)] = v.get<std::uint64_t>();
        }
        s.rows.push_back(std::move(r));
    }
    return s;
}

namespace detail {

/// The per-run numbers the summary aggregates, parseable back from a trace
/// CSV (plus the cone sidecar for HE-ITE).
struct TraceDigest {
    double final_alpha = 0.0;
    int steps_to_threshold = -1;  // first t with alpha >= 0.75
    bool gs_above_quarter = false;
    bool completed = true;
    int rows = 0;
    std::map<int, std::uint64_t> cone_histogram;
};

inline TraceDigest digest_trace(const OptimizerTrace& trace, int expected_steps) {
    TraceDigest d;
    d.rows = static_cast<int>(trace.steps.size());
    d.completed = trace.completed && d.rows == expected_steps + 1;
    for (const auto& s : trace.steps) {
        if (s.approx_ratio >= 0.75 && d.steps_to_threshold < 0) d.steps_to_threshold = s.t;
        if (s.gs_prob > 0.25) d.gs_above_quarter = true;
    }
    if (!trace.steps.empty()) d.final_alpha = trace.steps.back().approx_ratio;
    d.cone_histogram = trace.cone_width_histogram;
    return d;
}

inline TraceDigest digest_trace_file(const std::filesystem::path& csv, int expected_steps) {
    std::ifstream in(csv);
    if (!in) throw ValidationError("cannot open trace: " + csv.string());
    std::string line;
    std::getline(in, line);  // header
    TraceDigest d;
    double last_alpha = 0.0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 8) throw ValidationError("malformed trace row in " + csv.string());
        const int t = std::stoi(fields[0]);
        const double alpha = std::stod(fields[4]);
        const double gs = std::stod(fields[5]);
        if (alpha >= 0.75 && d.steps_to_threshold < 0) d.steps_to_threshold = t;
        if (gs > 0.25) d.gs_above_quarter = true;
        last_alpha = alpha;
        ++d.rows;
    }
    d.final_alpha = last_alpha;
    d.completed = d.rows == expected_steps + 1;
    const auto cones = csv.parent_path() / (csv.stem().string() + "_cones.csv");
    if (std::filesystem::exists(cones)) {
        std::ifstream cin(cones);
        std::getline(cin, line);  // header
        while (std::getline(cin, line)) {
            std::istringstream row(line);
            std::string w, count;
            std::getline(row, w, ',');
            std::getline(row, count, ',');
            d.cone_histogram[std::stoi(w)] += std::stoull(count);
        }
    }
    return d;
}

inline int upper_median(std::vector<int> values) {
    if (values.empty()) return -1;
    for (auto& v : values) {
        if (v < 0) v = std::numeric_limits<int>::max();  // never reached sorts last
    }
    std::sort(values.begin(), values.end());
    const int median = values[values.size() / 2];
    return median == std::numeric_limits<int>::max() ? -1 : median;
}

inline AlgoSizeSummary summarize_cell(int size, const std::string& algorithm,
                                      const std::vector<TraceDigest>& digests) {
    AlgoSizeSummary r;
    r.size = size;
    r.algorithm = algorithm;
    double sum = 0.0, sum_sq = 0.0;
    int gs_count = 0;
    for (const auto& d : digests) {
        if (!d.completed) {
            ++r.failures;
            continue;
        }
        ++r.instances;
        sum += d.final_alpha;
        sum_sq += d.final_alpha * d.final_alpha;
        r.steps_to_threshold.push_back(d.steps_to_threshold);
        gs_count += d.gs_above_quarter ? 1 : 0;
        for (const auto& [w, count] : d.cone_histogram) r.cone_width_histogram[w] += count;
    }
    if (r.instances > 0) {
        r.mean_final_alpha = sum / r.instances;
        const double var = std::max(0.0, sum_sq / r.instances -
                                             r.mean_final_alpha * r.mean_final_alpha);
        r.std_final_alpha = std::sqrt(var);
        r.fraction_gs_above_quarter = static_cast<double>(gs_count) / r.instances;
        r.median_steps_to_threshold = upper_median(r.steps_to_threshold);
    }
    return r;
}

}  // namespace detail

/// Run one (instance, algorithm) pair. Exposed so single runs can be
/// re-derived in isolation from the same seed scheme the ensemble uses.
inline OptimizerTrace run_single(const MaxCutProblem& problem, const RunConfig& config,
                                 const AlgorithmEntry& entry, int size, int instance_index,
                                 int algorithm_index) {
    OptimizerConfig oc = entry.config;
    oc.layers = config.layers_for(size, oc.algorithm);
    oc.shots = config.exact ? 0 : config.shots_for(size);
    oc.seed = derive_seed(config.master_seed, 2, static_cast<std::uint64_t>(size),
                          static_cast<std::uint64_t>(instance_index),
                          static_cast<std::uint64_t>(algorithm_index));
    switch (oc.algorithm) {
        case Algorithm::FVQE: {
            const auto ansatz = build_hea(size, oc.layers);
            return fvqe_run(problem, ansatz, oc);
        }
        case Algorithm::QVF: {
            const auto ansatz = build_hea(size, oc.layers);
            return qvf_run(problem, ansatz, oc);
        }
        case Algorithm::VQE: {
            const auto ansatz = build_hea(size, oc.layers);
            return vqe_run(problem, ansatz, oc);
        }
        case Algorithm::QAOA: return qaoa_run(problem, oc.layers, oc);
        case Algorithm::HEITE: {
            const auto ansatz = build_hea(size, 1);
            return heite_run(problem, ansatz, oc);
        }
    }
    throw ValidationError("unknown algorithm");
}

inline std::uint64_t instance_seed(const RunConfig& config, int size, int instance_index) {
    return derive_seed(config.master_seed, 1, static_cast<std::uint64_t>(size),
                       static_cast<std::uint64_t>(instance_index));
}

struct EnsembleResult {
    EnsembleSummary summary;
    std::vector<RunFailure> failures;
    bool resumed = false;  // true when an existing completed output was reused
};

/// Deterministic ensemble: instances derived from the master seed, each
/// (instance, algorithm) run self-seeded, traces and manifests persisted
/// under out_dir. Individual failures are recorded and excluded from the
/// aggregates; the ensemble never aborts on one failure. Rerunning a
/// completed configuration is a no-op unless force is set.
inline EnsembleResult run_ensemble(const RunConfig& config, const std::filesystem::path& out_dir,
                                   bool force = false) {
    namespace fs = std::filesystem;
    const fs::path summary_path = out_dir / "summary.json";
    if (!force && fs::exists(summary_path)) {
        {
            std::ifstream cfg_in(out_dir / "config.json");
            Json stored;
            if (cfg_in) cfg_in >> stored;
            if (stored != to_json(config)) {
                throw ValidationError(
                    "output directory holds results for a different config; use force to rerun");
            }
        }
        std::ifstream in(summary_path);
        Json j;
        in >> j;
        EnsembleResult result;
        result.summary = ensemble_summary_from_json(j.at("summary"));
        for (const auto& f : j.at("failures")) {
            result.failures.push_back(
                {{f.at("size").get<int>(), f.at("instance").get<int>(),
                  f.at("algorithm").get<std::string>()},
                 f.at("error").get<std::string>()});
        }
        result.resumed = true;
        return result;
    }

    fs::create_directories(out_dir / "traces");
    fs::create_directories(out_dir / "manifests");
    {
        std::ofstream out(out_dir / "config.json");
        out << to_json(config).dump(2) << '\n';
    }

    // Problems are generated up front so worker threads share them read-only.
    std::map<int, std::vector<MaxCutProblem>> problems;
    for (int size : config.sizes) {
        auto& list = problems[size];
        for (int i = 0; i < config.instances_per_size; ++i) {
            list.push_back(MaxCutProblem::build(generate_instance(size, instance_seed(config, size, i)),
                                                config.rescale_mode,
                                                config.ground_energy_floor));
        }
    }

    struct Task {
        int size = 0;
        std::size_t algo = 0;
        int instance = 0;
    };
    std::vector<Task> tasks;
    for (int size : config.sizes) {
        for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
            if (!config.algorithms[a].runs_at(size)) continue;
            for (int i = 0; i < config.instances_per_size; ++i) {
                tasks.push_back({size, a, i});
            }
        }
    }

    struct TaskOutcome {
        detail::TraceDigest digest;
        std::string error;
    };
    std::vector<TaskOutcome> outcomes(tasks.size());

    const auto run_task = [&](const Task& task) -> TaskOutcome {
        const auto& entry = config.algorithms[task.algo];
        const RunId id{task.size, task.instance, entry.name};
        const auto& problem =
            problems.at(task.size)[static_cast<std::size_t>(task.instance)];
        const auto started = std::chrono::steady_clock::now();
        OptimizerTrace trace;
        std::string error;
        try {
            trace = run_single(problem, config, entry, task.size, task.instance,
                               static_cast<int>(task.algo));
            if (!trace.completed) error = trace.abort_reason;
        } catch (const std::exception& e) {
            error = e.what();
            trace.completed = false;
            trace.abort_reason = error;
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        {
            std::ofstream out(out_dir / "traces" / (id.stem() + ".csv"));
            trace.write_csv(out);
        }
        if (!trace.cone_width_histogram.empty()) {
            std::ofstream out(out_dir / "traces" / (id.stem() + "_cones.csv"));
            out << "width,count\n";
            for (const auto& [w, count] : trace.cone_width_histogram) {
                out << w << ',' << count << '\n';
            }
        }
        {
            Json manifest;
            manifest["run"] = {{"size", task.size},
                               {"instance", task.instance},
                               {"algorithm", entry.name}};
            OptimizerConfig oc = entry.config;
            oc.layers = config.layers_for(task.size, oc.algorithm);
            oc.shots = config.exact ? 0 : config.shots_for(task.size);
            oc.seed = derive_seed(config.master_seed, 2, static_cast<std::uint64_t>(task.size),
                                  static_cast<std::uint64_t>(task.instance), task.algo);
            manifest["optimizer_config"] = to_json(oc);
            manifest["ansatz"] = {{"kind", oc.algorithm == Algorithm::QAOA ? "qaoa" : "hea"},
                                  {"layers", oc.layers}};
            manifest["problem"] = {
                {"instance_seed", instance_seed(config, task.size, task.instance)},
                {"rescale_mode", to_string(config.rescale_mode)},
                {"cost_upper_bound", problem.hamiltonian.cost_upper_bound()},
                {"bound_inflated", problem.bound_inflated},
                {"ground_energy_floor", config.ground_energy_floor},
                {"max_cost", problem.max_cost},
                {"optimal_basis", basis_to_string(problem.optimal_basis, task.size)}};
            manifest["completed"] = trace.completed;
            manifest["abort_reason"] = trace.abort_reason;
            manifest["wall_time_seconds"] = wall;
            manifest["total_circuits"] = trace.total_circuits;
            manifest["total_shots"] = trace.total_shots;
            manifest["filter_monotonicity_warning"] = trace.filter_monotonicity_warning;
            Json window = Json::array(), plateau = Json::array();
            for (const auto& s : trace.steps) {
                if (s.t == 0) continue;
                window.push_back(s.tau_window_hit);
                plateau.push_back(s.plateau_branch);
            }
            manifest["tau_window_hit"] = window;
            manifest["tau_plateau_branch"] = plateau;
            std::ofstream out(out_dir / "manifests" / (id.stem() + ".json"));
            out << manifest.dump(2) << '\n';
        }
        return {detail::digest_trace(trace, entry.config.steps), std::move(error)};
    };

    // Runs are independent and self-seeded, so any scheduling yields the
    // same bytes; outcomes are collected by task index and aggregated in the
    // fixed task order.
    const unsigned pool = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                          static_cast<unsigned>(tasks.size())));
    if (pool <= 1 || tasks.size() <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) outcomes[i] = run_task(tasks[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (unsigned w = 0; w < pool; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= tasks.size()) break;
                    outcomes[i] = run_task(tasks[i]);
                }
            });
        }
        for (auto& worker : workers) worker.join();
    }

    EnsembleResult result;
    std::size_t cursor = 0;
    for (int size : config.sizes) {
        for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
            const auto& entry = config.algorithms[a];
            if (!entry.runs_at(size)) continue;
            std::vector<detail::TraceDigest> digests;
            for (int i = 0; i < config.instances_per_size; ++i, ++cursor) {
                auto& outcome = outcomes[cursor];
                if (!outcome.error.empty()) {
                    result.failures.push_back({{size, i, entry.name}, outcome.error});
                }
                digests.push_back(std::move(outcome.digest));
            }
            result.summary.rows.push_back(detail::summarize_cell(size, entry.name, digests));
        }
    }
    result.summary.total_failures = static_cast<int>(result.failures.size());

    {
        Json j;
        j["summary"] = to_json(result.summary);
        Json fails = Json::array();
        for (const auto& f : result.failures) {
            fails.push_back({{"size", f.id.size},
                             {"instance", f.id.instance},
                             {"algorithm", f.id.algorithm},
                             {"error", f.error}});
        }
        j["failures"] = fails;
        std::ofstream out(summary_path);
        out << j.dump(2) << '\n';
    }
    return result;
}

/// Recompute the summary purely from the persisted trace files (and cone
/// sidecars); the result matches the summary produced by the run itself.
inline EnsembleSummary summarize(const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::ifstream cfg_in(out_dir / "config.json");
    if (!cfg_in) throw ValidationError("missing config.json in " + out_dir.string());
    Json cfg_json;
    cfg_in >> cfg_json;
    const RunConfig config = run_config_from_json(cfg_json);

    EnsembleSummary summary;
    int failures = 0;
    for (int size : config.sizes) {
        for (const auto& entry : config.algorithms) {
            if (!entry.runs_at(size)) continue;
            std::vector<detail::TraceDigest> digests;
            for (int i = 0; i < config.instances_per_size; ++i) {
                const RunId id{size, i, entry.name};
                const fs::path trace_path = out_dir / "traces" / (id.stem() + ".csv");
                if (!fs::exists(trace_path)) continue;
                digests.push_back(detail::digest_trace_file(trace_path, entry.config.steps));
            }
            auto cell = detail::summarize_cell(size, entry.name, digests);
            failures += cell.failures;
            summary.rows.push_back(std::move(cell));
        }
    }
    summary.total_failures = failures;
    return summary;
}

}  // namespace fvqe
