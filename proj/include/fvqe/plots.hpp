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
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fvqe/bench.hpp"
#include "fvqe/common.hpp"

namespace fvqe {

namespace detail {

inline std::vector<std::vector<double>> read_trace_columns(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw ValidationError("cannot open trace: " + csv.string());
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string field;
        std::vector<double> values;
        while (std::getline(row, field, ',')) values.push_back(std::stod(field));
        rows.push_back(std::move(values));
    }
    return rows;
}

inline std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

/// Minimal line-plot writer: fixed canvas, linear axes, optional mean +- std
/// bands. Every plot has a plain CSV sidecar carrying the same numbers.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, double x_max,
            double y_min, double y_max)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
          x_max_(x_max <= 0 ? 1 : x_max), y_min_(y_min), y_max_(y_max <= y_min ? y_min + 1 : y_max) {}

    void add_band(const std::vector<double>& xs, const std::vector<double>& lo,
                  const std::vector<double>& hi, const std::string& color) {
        std::ostringstream p;
        p << "<polygon fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) p << px(xs[i]) << ',' << py(lo[i]) << ' ';
        for (std::size_t i = xs.size(); i-- > 0;) p << px(xs[i]) << ',' << py(hi[i]) << ' ';
        p << "\"/>";
        shapes_.push_back(p.str());
    }

    void add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color, const std::string& label) {
        std::ostringstream p;
        p << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) p << px(xs[i]) << ',' << py(ys[i]) << ' ';
        p << "\"/>";
        shapes_.push_back(p.str());
        legend_.emplace_back(label, color);
    }

    void add_bar(double x, double width, double y, const std::string& color) {
        const double top = py_value(y);
        const double bottom = py_value(y_min_);
        std::ostringstream p;
        p << "<rect x=\"" << px(x) << "\" y=\"" << svg_number(top) << "\" width=\""
          << svg_number(width * (kWidth - 2.0 * kMargin) / x_max_) << "\" height=\""
          << svg_number(std::max(0.0, bottom - top)) << "\" fill=\"" << color << "\"/>";
        shapes_.push_back(p.str());
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
            << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out << "<text x=\"" << kWidth / 2 << "\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">"
            << title_ << "</text>\n";
        // axes
        out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
            << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
            << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
            << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 4; ++i) {
            const double fx = x_max_ * i / 4.0;
            const double fy = y_min_ + (y_max_ - y_min_) * i / 4.0;
            out << "<text x=\"" << px(fx) << "\" y=\"" << kHeight - kMargin + 14
                << "\" text-anchor=\"middle\" font-size=\"10\">" << svg_number(fx) << "</text>\n";
            out << "<text x=\"" << kMargin - 4 << "\" y=\"" << py(fy)
                << "\" text-anchor=\"end\" font-size=\"10\">" << svg_number(fy) << "</text>\n";
        }
        out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 6
            << "\" text-anchor=\"middle\" font-size=\"11\">" << x_label_ << "</text>\n";
        out << "<text x=\"14\" y=\"" << kHeight / 2
            << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 "
            << kHeight / 2 << ")\">" << y_label_ << "</text>\n";
        for (const auto& s : shapes_) out << s << '\n';
        int ly = kMargin + 6;
        for (const auto& [label, color] : legend_) {
            out << "<rect x=\"" << kWidth - kMargin - 120 << "\" y=\"" << ly - 8
                << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n";
            out << "<text x=\"" << kWidth - kMargin - 104 << "\" y=\"" << ly
                << "\" font-size=\"10\">" << label << "</text>\n";
            ly += 14;
        }
        out << "</svg>\n";
    }

  private:
    static constexpr int kWidth = 560;
    static constexpr int kHeight = 360;
    static constexpr int kMargin = 48;

    std::string px(double x) const {
        return svg_number(kMargin + (kWidth - 2.0 * kMargin) * x / x_max_);
    }
    double py_value(double y) const {
        const double f = (y - y_min_) / (y_max_ - y_min_);
        return kHeight - kMargin - (kHeight - 2.0 * kMargin) * f;
    }
    std::string py(double y) const { return svg_number(py_value(y)); }

    std::string title_, x_label_, y_label_;
    double x_max_, y_min_, y_max_;
    std::vector<std::string> shapes_;
    std::vector<std::pair<std::string, std::string>> legend_;
};

inline const char* plot_color(std::size_t i) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    return kColors[i % 6];
}

}  // namespace detail

/// Render the ensemble outputs: approximation-ratio-vs-step curves with
/// mean +- std bands per size, a final-ratio chart, and the cone-width
/// histogram. Every plot is backed by a CSV sidecar carrying exactly the
/// plotted numbers, so the plots are reproducible without this layer.
/// Missing traces produce warnings and partial output instead of a failure.
inline std::vector<std::string> emit_plots(const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> warnings;
    std::ifstream cfg_in(out_dir / "config.json");
    if (!cfg_in) throw ValidationError("missing config.json in " + out_dir.string());
    Json cfg_json;
    cfg_in >> cfg_json;
    const RunConfig config = run_config_from_json(cfg_json);
    const fs::path plot_dir = out_dir / "plots";

    bool any = false;
    for (int size : config.sizes) {
        // step -> per-algorithm mean/std across instances
        std::vector<std::string> algo_names;
        std::vector<std::vector<double>> means, stds;
        int max_steps = 0;
        for (const auto& entry : config.algorithms) {
            if (!entry.runs_at(size)) continue;
            std::vector<std::vector<double>> alphas;  // [instance][step]
            for (int i = 0; i < config.instances_per_size; ++i) {
                const RunId id{size, i, entry.name};
                const fs::path trace = out_dir / "traces" / (id.stem() + ".csv");
                if (!fs::exists(trace)) {
                    warnings.push_back("missing trace " + trace.string());
                    continue;
                }
                const auto rows = detail::read_trace_columns(trace);
                if (static_cast<int>(rows.size()) != entry.config.steps + 1) {
                    // Aborted run; the summary excludes it, so the curves do too.
                    warnings.push_back("partial trace skipped: " + trace.string());
                    continue;
                }
                std::vector<double> alpha;
                alpha.reserve(rows.size());
                for (const auto& r : rows) alpha.push_back(r[4]);
                alphas.push_back(std::move(alpha));
            }
            if (alphas.empty()) continue;
            std::size_t steps = alphas.front().size();
            for (const auto& a : alphas) steps = std::min(steps, a.size());
            std::vector<double> mean(steps, 0.0), stddev(steps, 0.0);
            for (std::size_t t = 0; t < steps; ++t) {
                double s = 0, s2 = 0;
                for (const auto& a : alphas) {
                    s += a[t];
                    s2 += a[t] * a[t];
                }
                mean[t] = s / alphas.size();
                stddev[t] = std::sqrt(std::max(0.0, s2 / alphas.size() - mean[t] * mean[t]));
            }
            algo_names.push_back(entry.name);
            max_steps = std::max(max_steps, static_cast<int>(steps) - 1);
            means.push_back(std::move(mean));
            stds.push_back(std::move(stddev));
        }
        if (algo_names.empty()) continue;
        any = true;
        fs::create_directories(plot_dir);

        const std::string stem = "alpha_vs_step_n" + std::to_string(size);
        {
            std::ofstream out(plot_dir / (stem + ".csv"));
            out << "step";
            for (const auto& name : algo_names) out << ',' << name << "_mean," << name << "_std";
            out << '\n';
            for (int t = 0; t <= max_steps; ++t) {
                out << t;
                for (std::size_t a = 0; a < algo_names.size(); ++a) {
                    const auto& m = means[a];
                    const auto& s = stds[a];
                    const std::size_t idx = std::min<std::size_t>(t, m.size() - 1);
                    out << ',' << format_double(m[idx]) << ',' << format_double(s[idx]);
                }
                out << '\n';
            }
        }
        detail::SvgPlot plot("approximation ratio, n = " + std::to_string(size),
                             "optimization step", "approximation ratio",
                             static_cast<double>(max_steps), 0.0, 1.0);
        for (std::size_t a = 0; a < algo_names.size(); ++a) {
            std::vector<double> xs(means[a].size());
            for (std::size_t t = 0; t < xs.size(); ++t) xs[t] = static_cast<double>(t);
            std::vector<double> lo(means[a].size()), hi(means[a].size());
            for (std::size_t t = 0; t < xs.size(); ++t) {
                lo[t] = std::max(0.0, means[a][t] - stds[a][t]);
                hi[t] = std::min(1.0, means[a][t] + stds[a][t]);
            }
            plot.add_band(xs, lo, hi, detail::plot_color(a));
            plot.add_line(xs, means[a], detail::plot_color(a), algo_names[a]);
        }
        plot.write(plot_dir / (stem + ".svg"));
    }

    // Final approximation ratios per (size, algorithm).
    const fs::path summary_path = out_dir / "summary.json";
    if (fs::exists(summary_path)) {
        std::ifstream in(summary_path);
        Json j;
        in >> j;
        const EnsembleSummary summary = ensemble_summary_from_json(j.at("summary"));
        if (!summary.rows.empty()) {
            any = true;
            fs::create_directories(plot_dir);
            {
                std::ofstream out(plot_dir / "final_alpha.csv");
                out << "size,algorithm,mean_final_alpha,std_final_alpha\n";
                for (const auto& r : summary.rows) {
                    out << r.size << ',' << r.algorithm << ','
                        << format_double(r.mean_final_alpha) << ','
                        << format_double(r.std_final_alpha) << '\n';
                }
            }
            {
                detail::SvgPlot bars("final approximation ratio", "size / algorithm",
                                     "approximation ratio",
                                     static_cast<double>(summary.rows.size()), 0.0, 1.0);
                std::map<std::string, std::size_t> algo_color;
                for (std::size_t i = 0; i < summary.rows.size(); ++i) {
                    const auto& r = summary.rows[i];
                    algo_color.emplace(r.algorithm, algo_color.size());
                    bars.add_bar(static_cast<double>(i) + 0.15, 0.7, r.mean_final_alpha,
                                 detail::plot_color(algo_color[r.algorithm]));
                }
                for (const auto& [name, color] : algo_color) {
                    bars.add_line({}, {}, detail::plot_color(color), name);  // legend entry
                }
                bars.write(plot_dir / "final_alpha.svg");
            }

            std::map<int, std::uint64_t> cones;
            for (const auto& r : summary.rows) {
                for (const auto& [w, count] : r.cone_width_histogram) cones[w] += count;
            }
            if (!cones.empty()) {
                std::ofstream cone_out(plot_dir / "cone_widths.csv");
                cone_out << "width,count\n";
                std::uint64_t total = 0;
                for (const auto& [w, count] : cones) total += count;
                for (const auto& [w, count] : cones) cone_out << w << ',' << count << '\n';

                detail::SvgPlot hist("causal cone widths", "qubits in cone", "fraction of circuits",
                                     static_cast<double>(cones.rbegin()->first + 1), 0.0, 1.0);
                std::size_t color = 0;
                for (const auto& [w, count] : cones) {
                    hist.add_bar(w - 0.4, 0.8, static_cast<double>(count) / total,
                                 detail::plot_color(color));
                }
                (void)color;
                hist.write(plot_dir / "cone_widths.svg");
            }
        }
    } else {
        warnings.push_back("missing summary.json; final-ratio chart skipped");
    }

    if (!any && warnings.empty()) {
        // Empty ensemble: nothing to plot, and that is a success.
        return warnings;
    }
    return warnings;
}

}  // namespace fvqe
