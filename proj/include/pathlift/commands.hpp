#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pathlift/batch.hpp"
#include "pathlift/manifest.hpp"
#include "pathlift/solver.hpp"
#include "pathlift/verify.hpp"

namespace pathlift {

struct RunReport {
    std::vector<SummaryRow> rows;
    std::vector<PathSolution> solutions;
    std::vector<std::string> trajectory_files;
    std::vector<std::string> warnings;
    double mean_iterations = 0.0;
    double mean_seconds = 0.0;
    bool all_converged = true;
};

namespace detail {

inline std::string trajectory_path(const std::string& out_dir, int id) {
    std::ostringstream name;
    name << "path_" << std::setw(3) << std::setfill('0') << id << ".csv";
    return (std::filesystem::path(out_dir) / name.str()).string();
}

inline void write_outputs(RunReport& report, const std::vector<BatchItem>& items,
                          const RunManifest& manifest) {
    std::filesystem::create_directories(manifest.out_dir);
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::string file = trajectory_path(manifest.out_dir, static_cast<int>(i));
        std::ofstream out(file);
        if (!out) throw ManifestError("cannot write trajectory file '" + file + "'");
        write_trajectory_csv(out, report.solutions[i], items[i].spec, items[i].config,
                             manifest.raw);
        report.trajectory_files.push_back(file);

        SummaryRow row;
        row.path_id = static_cast<int>(i);
        row.u = report.solutions[i].value;
        row.iterations = report.solutions[i].iterations;
        row.converged = report.solutions[i].converged;
        row.seconds = report.solutions[i].wall_seconds;
        report.rows.push_back(row);
        report.all_converged = report.all_converged && row.converged;
        report.mean_iterations += static_cast<double>(row.iterations);
        report.mean_seconds += row.seconds;
    }
    if (!items.empty()) {
        report.mean_iterations /= static_cast<double>(items.size());
        report.mean_seconds /= static_cast<double>(items.size());
    }
    const std::string summary = (std::filesystem::path(manifest.out_dir) / "summary.csv").string();
    std::ofstream out(summary);
    if (!out) throw ManifestError("cannot write summary file '" + summary + "'");
    write_summary_csv(out, report.rows);
}

} // namespace detail

/// Solve the single path described by the manifest and persist the
/// trajectory + summary files.
inline RunReport cmd_solve(const RunManifest& manifest) {
    BuiltProblem built = build_problem(manifest);
    RunReport report;
    report.warnings = built.warnings;

    std::vector<BatchItem> items{{built.spec, built.config}};
    report.solutions.push_back(solve_path(built.spec, built.config));
    detail::write_outputs(report, items, manifest);
    return report;
}

/// Solve many starts: either the manifest's explicit list or `count`
/// points sampled uniformly from the box with the manifest seed. Each
/// path gets its own seed stream keyed by (manifest seed, index), so
/// results do not depend on worker count.
inline RunReport cmd_batch(const RunManifest& manifest) {
    RunReport report;
    std::vector<Vector> starts;
    if (!manifest.starts.empty()) {
        for (const auto& s : manifest.starts) starts.push_back(detail::to_vector(s));
    } else {
        if (manifest.count < 1) throw ManifestError("batch needs key 'count' >= 1 or 'starts'");
        if (!manifest.box_lo || !manifest.box_hi)
            throw ManifestError("batch sampling needs keys 'box_lo' and 'box_hi'");
        const Vector lo = detail::to_vector(*manifest.box_lo);
        const Vector hi = detail::to_vector(*manifest.box_hi);
        if (lo.size() != hi.size()) throw ManifestError("box_lo/box_hi dimension mismatch");
        std::mt19937_64 rng(manifest.seed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int i = 0; i < manifest.count; ++i) {
            Vector x(lo.size());
            for (Eigen::Index d = 0; d < lo.size(); ++d)
                x[d] = lo[d] + (hi[d] - lo[d]) * u01(rng);
            starts.push_back(std::move(x));
        }
    }

    std::vector<BatchItem> items;
    items.reserve(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) {
        BuiltProblem built = build_problem(manifest, starts[i]);
        built.config.seed = path_seed(manifest.seed, i);
        if (i == 0) report.warnings = built.warnings;
        items.push_back({std::move(built.spec), built.config});
    }

    report.solutions = solve_batch(items, manifest.workers);
    detail::write_outputs(report, items, manifest);
    return report;
}

struct ScalingReport {
    std::vector<ScalingRow> rows;
    std::vector<double> mean_u; // per dim, same order as rows
    bool all_converged = true;
    std::string csv_file;
};

/// Dimension sweep on the Gaussian-bump benchmark: for each dim n, solve
/// x = (-0.9, -1, ..., -1) -> (1, ..., 1) on 2 exp(-|x|^2) for `trials`
/// random initializations and record wall-time statistics.
inline ScalingReport cmd_scaling(const std::vector<int>& dims, int trials,
                                 const RunManifest& manifest) {
    if (dims.empty()) throw ManifestError("scaling needs a non-empty dims list");
    if (trials < 1) throw ManifestError("scaling needs trials >= 1");

    ScalingReport report;
    for (const int dim : dims) {
        RunManifest m = manifest;
        m.dim = dim;
        {
            std::ostringstream g;
            g << "gaussian:amp=2,center=0";
            for (int d = 1; d < dim; ++d) g << ",0";
            m.manifold_text = g.str();
        }
        m.goal = std::vector<double>(static_cast<size_t>(dim), 1.0);
        std::vector<double> start(static_cast<size_t>(dim), -1.0);
        start[0] = -0.9;
        m.start = start;

        std::vector<BatchItem> items;
        for (int trial = 0; trial < trials; ++trial) {
            BuiltProblem built = build_problem(m);
            built.config.seed = path_seed(manifest.seed, static_cast<std::uint64_t>(dim) * 1000 +
                                                             static_cast<std::uint64_t>(trial));
            items.push_back({std::move(built.spec), built.config});
        }
        const auto solutions = solve_batch(items, manifest.workers);

        double mean = 0.0, mean_u = 0.0;
        for (const auto& s : solutions) {
            mean += s.wall_seconds;
            mean_u += s.value;
            report.all_converged = report.all_converged && s.converged;
        }
        mean /= trials;
        mean_u /= trials;
        double var = 0.0;
        for (const auto& s : solutions) var += (s.wall_seconds - mean) * (s.wall_seconds - mean);
        const double stddev = trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0;

        report.rows.push_back({dim, mean, stddev});
        report.mean_u.push_back(mean_u);
    }

    std::filesystem::create_directories(manifest.out_dir);
    report.csv_file = (std::filesystem::path(manifest.out_dir) / "scaling.csv").string();
    std::ofstream out(report.csv_file);
    if (!out) throw ManifestError("cannot write scaling file '" + report.csv_file + "'");
    write_scaling_csv(out, report.rows);
    return report;
}

/// Run the oracle suites and print a pass/fail table. Returns true when
/// every requested suite passed.
inline bool cmd_verify(const std::vector<std::string>& filter, std::ostream& out) {
    const auto results = run_verify_suites(filter);
    if (results.empty()) {
        out << "no suites matched the filter\n";
        return false;
    }
    bool all = true;
    out << std::left << std::setw(12) << "suite" << std::setw(8) << "status" << std::setw(12)
        << "cases" << std::setw(16) << "worst_error" << "detail\n";
    for (const auto& r : results) {
        out << std::left << std::setw(12) << r.name << std::setw(8) << (r.passed ? "PASS" : "FAIL")
            << std::setw(12) << r.cases << std::setw(16) << std::setprecision(4) << r.worst_error
            << r.detail << "\n";
        all = all && r.passed;
    }
    return all;
}

} // namespace pathlift
