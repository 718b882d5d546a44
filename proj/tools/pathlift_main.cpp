// pathlift command-line tool: solve single paths, batches of random
// starts, dimension sweeps, or run the built-in verification suites.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pathlift/pathlift.hpp"

namespace {

struct Overrides {
    std::optional<int> dim;
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<long> seed;
    std::optional<double> tol;
    std::optional<long> max_iters;
    std::optional<double> tau;
    std::optional<int> workers;
    std::optional<std::string> out;
    std::optional<std::string> manifold;
    std::optional<std::string> speed;
    std::optional<std::string> start;
    std::optional<std::string> goal;
    std::optional<int> count;
    std::optional<std::string> box_lo;
    std::optional<std::string> box_hi;
    bool raw = false;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--dim", ov.dim, "problem dimension");
    cmd->add_option("--dt", ov.dt, "time step");
    cmd->add_option("--horizon", ov.horizon, "time horizon");
    cmd->add_option("--seed", ov.seed, "RNG seed");
    cmd->add_option("--tol", ov.tol, "convergence tolerance");
    cmd->add_option("--max-iters", ov.max_iters, "iteration budget");
    cmd->add_option("--tau", ov.tau, "primal step (0 = automatic)");
    cmd->add_option("--workers", ov.workers, "worker threads (0 = hardware)");
    cmd->add_option("--out", ov.out, "output directory");
    cmd->add_option("--manifold", ov.manifold, "manifold spec, e.g. sinusoid:a=1");
    cmd->add_option("--speed", ov.speed, "speed spec, e.g. const:c=1");
    cmd->add_option("--start", ov.start, "start point, comma floats");
    cmd->add_option("--goal", ov.goal, "goal point, comma floats");
    cmd->add_option("--count", ov.count, "batch: number of sampled starts");
    cmd->add_option("--box-lo", ov.box_lo, "batch: sampling box lower corner");
    cmd->add_option("--box-hi", ov.box_hi, "batch: sampling box upper corner");
    cmd->add_flag("--raw", ov.raw, "write trajectories in internal goal-first order");
}

pathlift::RunManifest load_manifest(const std::string& path, const Overrides& ov) {
    pathlift::RunManifest m;
    if (!path.empty()) m = pathlift::parse_manifest_file(path);
    if (ov.dim) pathlift::manifest_set(m, "dim", std::to_string(*ov.dim));
    if (ov.dt) pathlift::manifest_set(m, "dt", std::to_string(*ov.dt));
    if (ov.horizon) pathlift::manifest_set(m, "horizon", std::to_string(*ov.horizon));
    if (ov.seed) pathlift::manifest_set(m, "seed", std::to_string(*ov.seed));
    if (ov.tol) pathlift::manifest_set(m, "tol", std::to_string(*ov.tol));
    if (ov.max_iters) pathlift::manifest_set(m, "max_iters", std::to_string(*ov.max_iters));
    if (ov.tau) pathlift::manifest_set(m, "tau", std::to_string(*ov.tau));
    if (ov.workers) pathlift::manifest_set(m, "workers", std::to_string(*ov.workers));
    if (ov.out) m.out_dir = *ov.out;
    if (ov.manifold) m.manifold_text = *ov.manifold;
    if (ov.speed) m.speed_text = *ov.speed;
    if (ov.start) pathlift::manifest_set(m, "start", *ov.start);
    if (ov.goal) pathlift::manifest_set(m, "goal", *ov.goal);
    if (ov.count) pathlift::manifest_set(m, "count", std::to_string(*ov.count));
    if (ov.box_lo) pathlift::manifest_set(m, "box_lo", *ov.box_lo);
    if (ov.box_hi) pathlift::manifest_set(m, "box_hi", *ov.box_hi);
    if (ov.raw) m.raw = true;
    return m;
}

void print_report(const pathlift::RunReport& report) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& row : report.rows) {
        std::cout << "path " << row.path_id << ": u = " << row.u << ", iterations = "
                  << row.iterations << ", converged = " << (row.converged ? "yes" : "no")
                  << ", seconds = " << row.seconds << "\n";
    }
    if (report.rows.size() > 1)
        std::cout << "mean iterations = " << report.mean_iterations
                  << ", mean seconds = " << report.mean_seconds << "\n";
    for (const auto& f : report.trajectory_files) std::cout << "wrote " << f << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimal-time path planning on height-function terrain"};
    app.require_subcommand(1);

    std::string manifest_path;
    Overrides ov;

    auto* solve = app.add_subcommand("solve", "solve one path from a manifest");
    solve->add_option("manifest", manifest_path, "manifest file (key=value lines)");
    add_override_flags(solve, ov);

    auto* batch = app.add_subcommand("batch", "solve many starts (list or sampled box)");
    batch->add_option("manifest", manifest_path, "manifest file (key=value lines)");
    add_override_flags(batch, ov);

    auto* scaling = app.add_subcommand("scaling", "dimension sweep on the Gaussian-bump benchmark");
    scaling->add_option("manifest", manifest_path, "manifest file (key=value lines)");
    std::vector<int> dims;
    int trials = 10;
    scaling->add_option("--dims", dims, "dimensions to run")->delimiter(',');
    scaling->add_option("--trials", trials, "trials per dimension");
    add_override_flags(scaling, ov);

    auto* verify = app.add_subcommand("verify", "run the oracle verification suites");
    std::vector<std::string> suites;
    verify->add_option("--suite", suites, "suite filter (sphere, prox, gradients, appendix, bound)")
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            const auto report = pathlift::cmd_solve(load_manifest(manifest_path, ov));
            print_report(report);
            return report.all_converged ? 0 : 1;
        }
        if (batch->parsed()) {
            const auto report = pathlift::cmd_batch(load_manifest(manifest_path, ov));
            print_report(report);
            return report.all_converged ? 0 : 1;
        }
        if (scaling->parsed()) {
            if (dims.empty()) dims = {10, 15, 20, 25, 30};
            const auto report =
                pathlift::cmd_scaling(dims, trials, load_manifest(manifest_path, ov));
            for (std::size_t i = 0; i < report.rows.size(); ++i)
                std::cout << "dim " << report.rows[i].dim << ": mean " << report.rows[i].mean_s
                          << " s, std " << report.rows[i].std_s << " s, mean u = "
                          << report.mean_u[i] << "\n";
            std::cout << "wrote " << report.csv_file << "\n";
            return report.all_converged ? 0 : 1;
        }
        if (verify->parsed()) {
            return pathlift::cmd_verify(suites, std::cout) ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
