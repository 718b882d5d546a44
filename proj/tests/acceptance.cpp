// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Expected to take a few minutes end to end on one core; the
// dimension sweep and the 25-D run dominate.

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pathlift/pathlift.hpp"

using namespace pathlift;

namespace {

struct CriterionResult {
    int id;
    std::string label;
    bool passed;
    std::string detail;
};

std::vector<CriterionResult> g_results;

void record(int id, const std::string& label, bool passed, const std::string& detail) {
    g_results.push_back({id, label, passed, detail});
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << "criterion " << id << ": " << label;
    if (!detail.empty()) std::cout << " -- " << detail;
    std::cout << std::endl;
}

Vector random_box_point(std::mt19937_64& rng, int dim, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
    return x;
}

double straight_arc(const ProblemSpec& spec, int samples = 200) {
    Matrix polyline(spec.start.size(), samples + 1);
    for (int i = 0; i <= samples; ++i)
        polyline.col(i) = spec.goal + (static_cast<double>(i) / samples) * (spec.start - spec.goal);
    return manifold_arclength(spec.manifold, polyline);
}

double heuristic_horizon(const ProblemSpec& spec, double dt) {
    const double t = 1.5 * straight_arc(spec);
    return std::max(dt, std::ceil(t / dt) * dt);
}

double max_perpendicular_deviation(const Matrix& states, const Vector& a, const Vector& b) {
    if ((b - a).norm() == 0.0) return 0.0;
    const Vector d = (b - a).normalized();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
        const Vector r = states.col(j) - a;
        worst = std::max(worst, (r - d.dot(r) * d).norm());
    }
    return worst;
}

struct SolvedRun {
    ProblemSpec spec;
    SolverConfig config;
    PathSolution solution;
};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(4) << v;
    return os.str();
}

} // namespace

int main() {
    const auto wall0 = std::chrono::steady_clock::now();
    std::vector<SolvedRun> flat_runs, unit_speed_runs;

    // ---- 1. Flat 10-D accuracy --------------------------------------------
    {
        std::mt19937_64 rng(101);
        bool ok = true;
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            SolvedRun run;
            run.spec.start = random_box_point(rng, 10, -1.0, 1.0);
            run.spec.goal = Vector::Zero(10);
            run.spec.manifold = ManifoldModel::flat(10);
            run.spec.speed = SpeedModel::constant(1.0);
            // Tight horizon: generous slack invites parked-slack plateaus
            // that inflate the resolved value.
            run.spec.horizon = std::ceil((run.spec.start.norm() + 0.4) / 0.1) * 0.1;
            run.config.time_steps = static_cast<int>(std::lround(run.spec.horizon / 0.1));
            run.config.tolerance = 1e-3;
            run.config.max_iterations = 40000;
            run.config.seed = path_seed(1000, static_cast<std::uint64_t>(i));
            run.solution = solve_path(run.spec, run.config);

            const double err = std::abs(run.solution.value - run.spec.start.norm());
            worst = std::max(worst, err);
            ok = ok && run.solution.converged && err <= 4e-2;
            flat_runs.push_back(run);
            unit_speed_runs.push_back(flat_runs.back());
        }
        record(1, "flat 10-D value error <= 4e-2", ok, "worst |u - |x|| = " + fmt(worst));
    }

    // ---- 2. 25-D Gaussian-bump value and first-coordinate detour ----------
    {
        SolvedRun run;
        const int dim = 25;
        run.spec.start = Vector::Constant(dim, -1.0);
        run.spec.start[0] = -0.9;
        run.spec.goal = Vector::Constant(dim, 1.0);
        run.spec.manifold = ManifoldModel::gaussian(2.0, Vector::Zero(dim));
        run.spec.speed = SpeedModel::constant(1.0);
        run.spec.horizon = 12.2;
        run.config.time_steps = 122;
        run.config.seed = 2025;
        run.solution = solve_path(run.spec, run.config);

        const int steps = run.config.time_steps;
        Vector deviation(dim);
        for (int d = 0; d < dim; ++d) {
            double dev = 0.0;
            for (int j = 0; j <= steps; ++j) {
                const double interp = run.solution.states(d, 0) +
                                      (run.solution.states(d, steps) - run.solution.states(d, 0)) *
                                          (static_cast<double>(j) / steps);
                dev = std::max(dev, std::abs(run.solution.states(d, j) - interp));
            }
            deviation[d] = dev;
        }
        const double others = deviation.tail(dim - 1).maxCoeff();
        const bool ok = run.solution.converged && run.solution.value >= 10.8 &&
                        run.solution.value <= 11.8 && deviation[0] > others;
        record(2, "25-D Gaussian bump: u in [10.8, 11.8], x1 detours most", ok,
               "u = " + fmt(run.solution.value) + ", dev(x1) = " + fmt(deviation[0]) +
                   ", max other dev = " + fmt(others) +
                   (run.solution.converged ? "" : ", DID NOT CONVERGE"));
        unit_speed_runs.push_back(run);
    }

    // ---- 3. Sinusoid convergence budget ------------------------------------
    {
        std::mt19937_64 rng(103);
        bool ok = true;
        double iteration_sum = 0.0;
        int converged_count = 0;
        for (int i = 0; i < 20; ++i) {
            SolvedRun run;
            run.spec.start = random_box_point(rng, 2, -1.0, 1.0);
            run.spec.goal = Vector::Constant(2, 1.0);
            run.spec.manifold = ManifoldModel::sinusoid(1.0);
            run.spec.speed = SpeedModel::constant(1.0);
            run.spec.horizon = heuristic_horizon(run.spec, 0.1);
            run.config.time_steps = static_cast<int>(std::lround(run.spec.horizon / 0.1));
            run.config.tolerance = 1e-3;
            run.config.max_iterations = 40000;
            run.config.seed = path_seed(3000, static_cast<std::uint64_t>(i));
            run.solution = solve_path(run.spec, run.config);

            iteration_sum += static_cast<double>(run.solution.iterations);
            converged_count += run.solution.converged ? 1 : 0;
            ok = ok && run.solution.converged;
            unit_speed_runs.push_back(run);
        }
        record(3, "sinusoid a=1: 20/20 converge within 40000 iterations", ok,
               std::to_string(converged_count) + "/20 converged, mean iterations = " +
                   fmt(iteration_sum / 20.0));
    }

    // ---- 4. Hamiltonian oracle equivalence ---------------------------------
    {
        const SuiteResult r = run_sphere_suite();
        record(4, "closed-form Hamiltonian matches sphere brute force", r.passed,
               std::to_string(r.cases) + " cases, worst error " + fmt(r.worst_error));
    }

    // ---- 5. Shrinkage prox optimality --------------------------------------
    {
        const SuiteResult r = run_prox_suite();
        record(5, "shrinkage dominates 1e5 candidates/instance, grid gap <= 1e-3", r.passed,
               std::to_string(r.cases) + " instances, worst gap " + fmt(r.worst_error));
    }

    // ---- 6. Gradient correctness -------------------------------------------
    {
        const SuiteResult r = run_gradient_suite();
        record(6, "grad of ind*H vs central differences (rel err <= 1e-4)", r.passed,
               std::to_string(r.cases) + " cases, worst rel err " + fmt(r.worst_error));
    }

    // ---- 7. Pass-through bound audit ---------------------------------------
    {
        const SuiteResult r = run_bound_suite();
        record(7, "prox movement within 1.05x of the bound", r.passed,
               std::to_string(r.cases) + " cases, worst ratio " + fmt(r.worst_error));
    }

    // ---- 8. Cholesky / geometry suite --------------------------------------
    {
        std::mt19937_64 rng(108);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        bool ok = true;
        std::string why;

        for (int trial = 0; trial < 20 && ok; ++trial) {
            Matrix b = Matrix::NullaryExpr(10, 10, [&]() { return u(rng); });
            const Matrix a = b * b.transpose() / 10.0 + Matrix::Identity(10, 10);
            const Matrix l = cholesky_factor(a);
            if ((l * l.transpose() - a).norm() > 1e-12) {
                ok = false;
                why = "LL^T reconstruction";
            }
        }

        const ManifoldModel bump5 = ManifoldModel::gaussian(2.0, Vector::Zero(5));
        for (int trial = 0; trial < 20 && ok; ++trial) {
            const Vector x = random_box_point(rng, 5, -1.0, 1.0);
            const double g2 = bump5.gradient(x).squaredNorm();
            Eigen::SelfAdjointEigenSolver<Matrix> es(metric_matrix(bump5, x));
            Vector expect(5);
            expect << 1.0 / (1.0 + g2), 1.0, 1.0, 1.0, 1.0;
            std::sort(expect.data(), expect.data() + 5);
            if ((es.eigenvalues() - expect).cwiseAbs().maxCoeff() > 1e-10) {
                ok = false;
                why = "eigenvalue structure";
            }
        }

        const ManifoldModel ramp =
            ManifoldModel::from_height(3, [](const Vector& x) { return 1e-4 * x[0]; });
        if (ok && (metric_factor(ramp, Vector::Zero(3)).L - Matrix::Identity(3, 3)).norm() > 1e-3) {
            ok = false;
            why = "L -> I limit";
        }

        const ManifoldModel two_d[] = {ManifoldModel::sinusoid(1.0),
                                       ManifoldModel::gaussian(2.0, Vector::Zero(2))};
        for (const auto& m : two_d) {
            for (int trial = 0; trial < 50 && ok; ++trial) {
                const Vector x = random_box_point(rng, 2, -1.5, 1.5);
                const MetricFactor f = metric_factor(m, x);
                if ((f.L - cholesky_factor(f.A)).cwiseAbs().maxCoeff() > 1e-12) {
                    ok = false;
                    why = "2-D closed form vs general";
                }
            }
        }
        record(8, "Cholesky/geometry identities", ok, why);
    }

    // ---- 9. Flat-path geometry + unit-speed consistency --------------------
    {
        bool ok = true;
        double worst_dev = 0.0, worst_gap = 0.0;
        for (const auto& run : flat_runs) {
            const double dev =
                max_perpendicular_deviation(run.solution.states, run.spec.goal, run.spec.start);
            worst_dev = std::max(worst_dev, dev);
            ok = ok && dev <= 5e-2;
        }
        for (const auto& run : unit_speed_runs) {
            if (!run.solution.converged) continue;
            const double arc = manifold_arclength(run.spec.manifold, run.solution.states);
            const double dt = run.spec.horizon / run.config.time_steps;
            const double gap = std::abs(run.solution.value - arc);
            const double allowance = std::max(2.0 * dt, 0.05 * run.solution.value);
            worst_gap = std::max(worst_gap, gap - allowance);
            ok = ok && gap <= allowance;
        }
        record(9, "flat paths straight (<= 5e-2), |u - arclength| within allowance", ok,
               "worst deviation " + fmt(worst_dev) + ", worst allowance excess " + fmt(worst_gap));
    }

    // ---- 10. Dimensional scaling -------------------------------------------
    {
        RunManifest manifest;
        manifest.goal = std::vector<double>{1.0};
        manifest.seed = 7;
        manifest.out_dir = "acceptance_out";
        const ScalingReport report = cmd_scaling({10, 20, 30}, 3, manifest);
        const double t10 = report.rows.front().mean_s;
        const double t30 = report.rows.back().mean_s;
        const bool ok = report.all_converged && t30 <= 10.0 * t10;
        record(10, "mean wall time at dim 30 <= 10x dim 10", ok,
               "dim10 " + fmt(t10) + "s, dim30 " + fmt(t30) + "s, u(25-D row n/a)" +
                   (report.all_converged ? "" : ", NON-CONVERGED RUNS"));
    }

    // ---- 11. Determinism & parallel equivalence ----------------------------
    {
        ProblemSpec spec;
        spec.start = Vector::Constant(2, -0.8);
        spec.goal = Vector::Constant(2, 1.0);
        spec.manifold = ManifoldModel::gaussian(2.0, Vector::Zero(2));
        spec.speed = SpeedModel::constant(1.0);
        spec.horizon = 5.0;
        SolverConfig config;
        config.time_steps = 50;
        config.seed = 11;

        const PathSolution a = solve_path(spec, config);
        const PathSolution b = solve_path(spec, config);
        bool ok = a.states == b.states && a.costates == b.costates && a.value == b.value;

        std::vector<BatchItem> items;
        std::mt19937_64 rng(111);
        for (int i = 0; i < 4; ++i) {
            BatchItem item{spec, config};
            item.spec.start = random_box_point(rng, 2, -1.0, -0.5);
            item.config.seed = path_seed(11, static_cast<std::uint64_t>(i));
            items.push_back(item);
        }
        const auto serial = solve_batch(items, 1);
        const auto parallel = solve_batch(items, 4);
        for (int i = 0; i < 4; ++i) {
            ok = ok && serial[i].states == parallel[i].states &&
                 serial[i].value == parallel[i].value &&
                 serial[i].iterations == parallel[i].iterations;
        }
        record(11, "fixed seed bitwise-identical; batch independent of workers", ok, "");
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    int failures = 0;
    for (const auto& r : g_results) failures += r.passed ? 0 : 1;
    std::cout << (g_results.size() - failures) << "/" << g_results.size()
              << " acceptance criteria passed in " << fmt(wall) << " s" << std::endl;
    return failures == 0 ? 0 : 1;
}
