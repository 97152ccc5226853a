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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fvqe/bench.hpp"
#include "fvqe/paper_instance.hpp"
#include "fvqe/plots.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRunFailures = 3;

int cmd_generate(int n, int count, std::uint64_t seed, const fs::path& out) {
    fs::create_directories(out);
    for (int i = 0; i < count; ++i) {
        const std::uint64_t instance_seed = fvqe::derive_seed(seed, 1, n, i);
        const auto graph = fvqe::generate_instance(n, instance_seed);
        const fs::path stem = out / ("n" + std::to_string(n) + "_i" + std::to_string(i));
        {
            std::ofstream file(stem.string() + ".graph");
            graph.save(file);
        }
        const auto optimum = fvqe::brute_force_optimum(graph);
        fvqe::Json meta;
        meta["n_qubits"] = n;
        meta["seed"] = instance_seed;
        meta["num_edges"] = graph.edges().size();
        meta["total_weight"] = graph.total_weight();
        meta["max_cost"] = optimum.max_cost;
        meta["optimal_basis"] = fvqe::basis_to_string(optimum.basis, n);
        std::ofstream meta_file(stem.string() + ".json");
        meta_file << meta.dump(2) << '\n';
        std::cout << stem.string() << ".graph  max_cost=" << optimum.max_cost << " optimum="
                  << fvqe::basis_to_string(optimum.basis, n) << '\n';
    }
    return kExitOk;
}

int cmd_run(const std::string& config_file, const std::string& preset, bool exact_override,
            std::uint64_t seed, bool seed_set, const fs::path& out, bool force) {
    fvqe::RunConfig config;
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) {
            std::cerr << "cannot open config: " << config_file << '\n';
            return kExitValidation;
        }
        try {
            fvqe::Json j;
            in >> j;
            config = fvqe::run_config_from_json(j);
        } catch (const std::exception& e) {
            std::cerr << "invalid config: " << e.what() << '\n';
            return kExitValidation;
        }
    } else if (preset == "desk") {
        config = fvqe::desk_preset();
    } else if (preset == "paper") {
        config = fvqe::paper_preset();
    } else if (!preset.empty()) {
        std::cerr << "unknown preset: " << preset << " (expected desk or paper)\n";
        return kExitValidation;
    } else {
        std::cerr << "either --config or --preset {desk|paper} is required\n";
        return kExitValidation;
    }
    if (exact_override) config.exact = true;
    if (seed_set) config.master_seed = seed;

    const auto result = fvqe::run_ensemble(config, out, force);
    if (result.resumed) {
        std::cout << "output already complete for this config; pass --force to rerun\n";
    }
    for (const auto& row : result.summary.rows) {
        std::cout << "n=" << row.size << " " << row.algorithm << ": instances=" << row.instances
                  << " mean final alpha=" << row.mean_final_alpha
                  << " median steps to 0.75=" << row.median_steps_to_threshold
                  << " P(gs>0.25)=" << row.fraction_gs_above_quarter << '\n';
    }
    if (!result.failures.empty()) {
        std::cout << result.failures.size() << " run(s) failed and were excluded:\n";
        for (const auto& f : result.failures) {
            std::cout << "  " << f.id.stem() << ": " << f.error << '\n';
        }
        return kExitRunFailures;
    }
    return kExitOk;
}

int cmd_summarize(const fs::path& out) {
    const auto summary = fvqe::summarize(out);
    std::cout << fvqe::to_json(summary).dump(2) << '\n';
    return summary.total_failures > 0 ? kExitRunFailures : kExitOk;
}

int cmd_plot(const fs::path& out) {
    const auto warnings = fvqe::emit_plots(out);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "plots written to " << (out / "plots").string() << '\n';
    return kExitOk;
}

int cmd_verify_paper_instance(const fs::path& fixture, std::uint64_t shots, int steps,
                              std::uint64_t seed) {
    const auto report = fvqe::verify_paper_instance(fixture, shots, steps, seed);
    std::cout << "reference instance: " << fixture.string() << '\n';
    std::cout << "  brute-force optimum: " << report.brute_force_solution
              << " (expected " << report.expected_solution << ") -> "
              << (report.solution_matches ? "match" : "MISMATCH") << '\n';
    std::cout << "  max cut cost: " << report.max_cost
              << ", approximation ratio of the solution bitstring: " << report.optimal_alpha
              << '\n';
    std::cout << "  simulated F-VQE (inverse filter, g_c=0.2, reduced 1-layer ansatz, M=" << shots
              << ", " << steps << " steps):\n";
    std::cout << "    final approximation ratio: " << report.final_alpha
              << "   [hardware reference " << report.reference_alpha << " +- "
              << report.reference_alpha_ci << "]\n";
    std::cout << "    final ground-state probability: " << report.final_gs_prob
              << "   [hardware reference " << report.reference_gs_prob << " +- "
              << report.reference_gs_prob_ci << "]\n";
    std::cout << "  (simulated values are reported for comparison, not asserted)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Filtering variational quantum algorithms for weighted MaxCut"};
    app.require_subcommand(1);

    auto* generate = app.add_subcommand("generate", "generate random 3-regular instances");
    int gen_n = 9, gen_count = 1;
    std::uint64_t gen_seed = 2026;
    std::string gen_out = "instances";
    generate->add_option("--n", gen_n, "qubit count (vertices - 1; vertices must be even)");
    generate->add_option("--count", gen_count, "number of instances");
    generate->add_option("--seed", gen_seed, "master seed");
    generate->add_option("--out", gen_out, "output directory");

    auto* run = app.add_subcommand("run", "run a benchmark ensemble");
    std::string run_config, run_preset;
    bool run_exact = false, run_force = false;
    std::uint64_t run_seed = 0;
    std::string run_out = "out";
    run->add_option("--config", run_config, "ensemble config JSON file");
    run->add_option("--preset", run_preset, "named preset: desk (minutes) or paper (hours)");
    run->add_flag("--exact", run_exact, "force exact expectation values (no sampling)");
    auto* seed_opt = run->add_option("--seed", run_seed, "master seed override");
    run->add_flag("--force", run_force, "rerun even if the output directory is complete");
    run->add_option("--out", run_out, "output directory");

    auto* summarize = app.add_subcommand("summarize", "recompute the summary from trace files");
    std::string sum_out = "out";
    summarize->add_option("--out", sum_out, "output directory holding traces/");

    auto* plot = app.add_subcommand("plot", "emit SVG plots and plain-data sidecars");
    std::string plot_out = "out";
    plot->add_option("--out", plot_out, "output directory holding traces/ and summary.json");

    auto* verify = app.add_subcommand("verify-paper-instance",
                                      "check the bundled reference instance and rerun its protocol");
    std::string verify_fixture = "data/table2.graph";
    std::uint64_t verify_shots = 500, verify_seed = 2026;
    int verify_steps = 9;
    verify->add_option("--fixture", verify_fixture, "graph file of the reference instance");
    verify->add_option("--shots", verify_shots, "measurement shots per circuit");
    verify->add_option("--steps", verify_steps, "optimization steps");
    verify->add_option("--seed", verify_seed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) return cmd_generate(gen_n, gen_count, gen_seed, gen_out);
        if (run->parsed()) {
            return cmd_run(run_config, run_preset, run_exact, run_seed, seed_opt->count() > 0,
                           run_out, run_force);
        }
        if (summarize->parsed()) return cmd_summarize(sum_out);
        if (plot->parsed()) return cmd_plot(plot_out);
        if (verify->parsed()) {
            return cmd_verify_paper_instance(verify_fixture, verify_shots, verify_steps,
                                             verify_seed);
        }
    } catch (const fvqe::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRunFailures;
    }
    return kExitOk;
}
