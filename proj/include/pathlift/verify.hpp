#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pathlift/oracle.hpp"
#include "pathlift/solver.hpp"

namespace pathlift {

struct SuiteResult {
    std::string name;
    bool passed = true;
    double worst_error = 0.0;
    long cases = 0;
    std::string detail;
};

namespace detail {

// splitmix64; cheap enough to feed a billion prox candidates.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

inline Vector random_point(std::mt19937_64& rng, int dim, double halfwidth) {
    std::uniform_real_distribution<double> u(-halfwidth, halfwidth);
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
    return x;
}

inline Vector random_direction(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> gauss;
    Vector d(dim);
    do {
        for (int i = 0; i < dim; ++i) d[i] = gauss(rng);
    } while (d.norm() < 1e-8);
    return d / d.norm();
}

struct NamedManifold {
    std::string label;
    ManifoldModel model;
};

inline std::vector<NamedManifold> sphere_suite_manifolds() {
    return {
        {"flat-2d", ManifoldModel::flat(2)},
        {"flat-3d", ManifoldModel::flat(3)},
        {"sinusoid-2d", ManifoldModel::sinusoid(1.0)},
        {"gaussian-2d", ManifoldModel::gaussian(2.0, Vector::Zero(2))},
        {"gaussian-3d", ManifoldModel::gaussian(2.0, Vector::Zero(3))},
    };
}

} // namespace detail

using ClosedFormValueFn = std::function<double(const Vector& x, const Vector& p,
                                               const ManifoldModel& m, const SpeedModel& v,
                                               double t)>;

/// Closed-form Hamiltonian against the brute-force sphere search:
/// min-under-the-sphere must match 1 - v sqrt(p'Ap) to 1e-3 and the
/// argmin the closed-form minimizer to 1e-2 angular distance.
/// `closed_value` exists so tests can inject a corrupted formula and watch
/// the suite catch it.
inline SuiteResult run_sphere_suite(std::uint64_t seed = 20240801,
                                    int instances_per_manifold = 100,
                                    int sphere_count = 100000,
                                    const ClosedFormValueFn& closed_value = {}) {
    SuiteResult result;
    result.name = "sphere";
    result.detail = "Hamiltonian vs sphere brute force";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.3, 3.0);
    std::uniform_real_distribution<double> tdist(0.0, 5.0);

    const SpeedModel speeds[2] = {SpeedModel::constant(1.0), SpeedModel::quad_left()};

    for (const auto& nm : detail::sphere_suite_manifolds()) {
        const int dim = nm.model.dim();
        const Matrix dirs = sphere_directions(dim, sphere_count, seed);
        for (int i = 0; i < instances_per_manifold; ++i) {
            const Vector x = detail::random_point(rng, dim, 1.5);
            const Vector p = mag(rng) * detail::random_direction(rng, dim);
            const double t = tdist(rng);
            const SpeedModel& v = speeds[i % 2];

            const SphereMinResult brute = sphere_min_objective(x, p, nm.model, v, t, dirs);
            const double closed =
                closed_value ? closed_value(x, p, nm.model, v, t)
                             : 1.0 - v.value(x, t) *
                                         std::sqrt(metric_quadratic(nm.model.gradient(x), p));
            const double value_err = std::abs(closed - brute.min_value);

            const Vector astar = closed_form_minimizer(x, p, nm.model);
            const double cosang = std::clamp(astar.dot(brute.argmin), -1.0, 1.0);
            const double angle_err = std::acos(cosang);

            ++result.cases;
            result.worst_error = std::max({result.worst_error, value_err, angle_err / 10.0});
            if (value_err > 1e-3 || angle_err > 1e-2) {
                result.passed = false;
                if (result.detail.find("FIRST FAIL") == std::string::npos)
                    result.detail += " | FIRST FAIL at " + nm.label + " #" + std::to_string(i) +
                                     " value_err=" + std::to_string(value_err) +
                                     " angle_err=" + std::to_string(angle_err);
            }
        }
    }
    return result;
}

/// Shrinkage formula vs (a) a horde of random candidates that must never
/// beat it and (b) the nested grid prox, which must land within 1e-3.
inline SuiteResult run_prox_suite(std::uint64_t seed = 20240802, int instances = 10000,
                                  long candidates_per_instance = 100000) {
    SuiteResult result;
    result.name = "prox";
    result.detail = "shrinkage optimality + grid prox agreement";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::uniform_real_distribution<double> sdt(0.01, 0.3);
    std::uint64_t fast_state = seed ^ 0xABCDEF1234567890ULL;

    const ManifoldModel flat = ManifoldModel::flat(2);
    const SpeedModel speeds[2] = {SpeedModel::constant(1.0), SpeedModel::quad_left()};

    double worst_dominance = 0.0, worst_grid = 0.0;
    for (int i = 0; i < instances; ++i) {
        Vector beta(2), x(2), goal(2);
        beta << coord(rng), coord(rng);
        x << coord(rng), coord(rng);
        goal << coord(rng), coord(rng);
        if (i % 100 == 7) x = goal; // threshold-free edge: no shrinkage at the goal
        const IndicatorParams ip{goal, 50.0};
        const double sigma_dt = sdt(rng);
        const SpeedModel& v = speeds[i % 2];
        const double t = 0.0;

        const CostateUpdate upd = prox_costate(beta, x, t, sigma_dt, ip, flat, v);
        const double threshold = sigma_dt * smooth_indicator(x, ip) * v.value(x, t);
        const auto objective = [&](double w0, double w1) {
            const double d0 = w0 - beta[0], d1 = w1 - beta[1];
            return threshold * std::sqrt(w0 * w0 + w1 * w1) + 0.5 * (d0 * d0 + d1 * d1);
        };
        const double formula_obj = objective(upd.w[0], upd.w[1]);

        const double hw = std::max({2.0 * beta.norm(), 2.0 * threshold, 0.5});
        for (long c = 0; c < candidates_per_instance; ++c) {
            const double w0 = beta[0] + hw * (2.0 * detail::uniform01(fast_state) - 1.0);
            const double w1 = beta[1] + hw * (2.0 * detail::uniform01(fast_state) - 1.0);
            const double gap = formula_obj - objective(w0, w1);
            if (gap > worst_dominance) worst_dominance = gap;
        }

        const auto norm_term = [&](const Vector& w) { return threshold * w.norm(); };
        const Vector grid = numeric_prox(norm_term, beta, 1.2 * beta.norm() + 0.1);
        worst_grid = std::max(worst_grid, (grid - upd.w).norm());
        ++result.cases;
    }

    result.worst_error = std::max(worst_dominance, worst_grid);
    if (worst_dominance > 1e-10 || worst_grid > 1e-3) {
        result.passed = false;
        result.detail += " | dominance gap " + std::to_string(worst_dominance) + ", grid gap " +
                         std::to_string(worst_grid);
    }
    return result;
}

/// Analytic gradient of ind*H against central differences at h = 1e-6,
/// relative error <= 1e-4 per builtin manifold/speed pair.
inline SuiteResult run_gradient_suite(std::uint64_t seed = 20240803, int instances_per_pair = 100) {
    SuiteResult result;
    result.name = "gradients";
    result.detail = "grad of ind*H vs central differences";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.2, 3.0);
    std::uniform_real_distribution<double> sharp(10.0, 200.0);

    std::vector<detail::NamedManifold> manifolds = {
        {"flat-2d", ManifoldModel::flat(2)},
        {"sinusoid-2d", ManifoldModel::sinusoid(1.0)},
        {"gaussian-2d", ManifoldModel::gaussian(2.0, Vector::Zero(2))},
        {"gaussian-5d", ManifoldModel::gaussian(1.5, Vector::Zero(5))},
    };
    const SpeedModel speeds[2] = {SpeedModel::constant(1.0), SpeedModel::quad_left()};

    for (const auto& nm : manifolds) {
        const int dim = nm.model.dim();
        for (const SpeedModel& v : speeds) {
            for (int i = 0; i < instances_per_pair; ++i) {
                const Vector x = detail::random_point(rng, dim, 1.5);
                const Vector p = mag(rng) * detail::random_direction(rng, dim);
                const Vector goal = detail::random_point(rng, dim, 1.5);
                const IndicatorParams ip{goal, sharp(rng)};
                const double t = 0.0;

                const Vector analytic = grad_x_hamiltonian(nm.model, v, x, p, t, ip);
                const auto field = [&](const Vector& y) {
                    return smooth_indicator(y, ip) * hamiltonian(nm.model, v, y, p, t);
                };
                const Vector fd = fd_gradient(field, x, 1e-6);
                // 1e-6 floor: below it both sides sit at the central-difference
                // noise level (eps*|f|/h ~ 1e-10) and a ratio carries no signal.
                const double rel =
                    (analytic - fd).norm() / std::max({analytic.norm(), fd.norm(), 1e-6});

                ++result.cases;
                result.worst_error = std::max(result.worst_error, rel);
                if (rel > 1e-4) {
                    result.passed = false;
                    if (result.detail.find("FIRST FAIL") == std::string::npos)
                        result.detail += " | FIRST FAIL at " + nm.label + " #" +
                                         std::to_string(i) + " rel=" + std::to_string(rel);
                }
            }
        }
    }
    return result;
}

/// The closed-form minimizer is unit length and attains exactly
/// -sqrt(p'Ap), including when p and grad M are linearly dependent.
inline SuiteResult run_appendix_suite(std::uint64_t seed = 20240804, int instances = 1000) {
    SuiteResult result;
    result.name = "appendix";
    result.detail = "closed-form minimizer identity";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.1, 3.0);
    std::uniform_real_distribution<double> amp(0.5, 3.0);
    std::uniform_int_distribution<int> dims(2, 10);

    for (int i = 0; i < instances; ++i) {
        const int dim = dims(rng);
        ManifoldModel m = ManifoldModel::flat(dim);
        if (i % 3 == 1) m = ManifoldModel::gaussian(amp(rng), detail::random_point(rng, dim, 0.5));
        if (i % 3 == 2 && dim == 2) m = ManifoldModel::sinusoid(amp(rng));
        const Vector x = detail::random_point(rng, dim, 1.5);
        const Vector g = m.gradient(x);

        Vector p = mag(rng) * detail::random_direction(rng, dim);
        if (i % 5 == 0 && g.norm() > 1e-6) p = mag(rng) * g / g.norm(); // dependent pair

        const Vector astar = closed_form_minimizer(x, p, m);
        const double s = g.dot(astar);
        const double f_astar = p.dot(astar) / std::sqrt(1.0 + s * s);
        const double target = std::sqrt(metric_quadratic(g, p));

        const double unit_err = std::abs(astar.norm() - 1.0);
        const double identity_err = std::abs(f_astar + target);

        ++result.cases;
        result.worst_error = std::max({result.worst_error, unit_err, identity_err});
        if (unit_err > 1e-10 || identity_err > 1e-10) {
            result.passed = false;
            if (result.detail.find("FIRST FAIL") == std::string::npos)
                result.detail += " | FIRST FAIL #" + std::to_string(i) +
                                 " unit=" + std::to_string(unit_err) +
                                 " identity=" + std::to_string(identity_err);
        }
    }
    return result;
}

/// Pass-through error bound audit: the accurately computed prox point of
/// -tau_dt H(., p, t) stays within 1.05x of the bound.
inline SuiteResult run_bound_suite(std::uint64_t seed = 20240805, int instances = 100) {
    SuiteResult result;
    result.name = "bound";
    result.detail = "prox distance vs tau*dt*|p|*(|grad v| + 2|v| ||HM||)";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(0.5, 2.0);
    std::uniform_real_distribution<double> taudt(1e-3, 1e-2);

    std::vector<detail::NamedManifold> manifolds = {
        {"sinusoid-a0.5", ManifoldModel::sinusoid(0.5)},
        {"sinusoid-a1", ManifoldModel::sinusoid(1.0)},
        {"gaussian-2d", ManifoldModel::gaussian(2.0, Vector::Zero(2))},
    };
    const SpeedModel speeds[2] = {SpeedModel::constant(1.0), SpeedModel::quad_left()};

    for (int i = 0; i < instances; ++i) {
        const auto& nm = manifolds[i % manifolds.size()];
        const SpeedModel& v = speeds[i % 2];
        const Vector nu = detail::random_point(rng, 2, 1.2);
        const Vector p = mag(rng) * detail::random_direction(rng, 2);
        const double t = 0.0;

        // Keep the instance inside the small-step regime the bound assumes:
        // the expected prox movement (the bound evaluated at nu) stays well
        // inside the search box.
        const double scale = p.norm() * (v.gradient(nu, t).norm() +
                                         2.0 * v.value(nu, t) *
                                             spectral_norm_sym(nm.model.hessian(nu)));
        const double tau_dt = std::min(taudt(rng), 0.08 / std::max(scale, 1e-6));

        const auto objective = [&](const Vector& y) {
            return -tau_dt * v.value(y, t) * std::sqrt(metric_quadratic(nm.model.gradient(y), p));
        };
        const Vector xstar = numeric_prox(objective, nu, 0.25, 4, 31);
        const double lhs = (xstar - nu).norm();
        const double rhs = prox_error_bound(nm.model, v, xstar, p, t, tau_dt);

        ++result.cases;
        const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? 1e300 : 0.0);
        result.worst_error = std::max(result.worst_error, ratio);
        if (lhs > 1.05 * rhs) {
            result.passed = false;
            if (result.detail.find("FIRST FAIL") == std::string::npos)
                result.detail += " | FIRST FAIL at " + nm.label + " #" + std::to_string(i) +
                                 " lhs=" + std::to_string(lhs) + " rhs=" + std::to_string(rhs);
        }
    }
    return result;
}

/// Run the named suites ("sphere", "prox", "gradients", "appendix",
/// "bound"); an empty filter runs all of them.
inline std::vector<SuiteResult> run_verify_suites(const std::vector<std::string>& filter = {}) {
    const auto wanted = [&](const std::string& name) {
        if (filter.empty()) return true;
        for (const auto& f : filter)
            if (f == name) return true;
        return false;
    };
    std::vector<SuiteResult> results;
    if (wanted("sphere")) results.push_back(run_sphere_suite());
    if (wanted("prox")) results.push_back(run_prox_suite());
    if (wanted("gradients")) results.push_back(run_gradient_suite());
    if (wanted("appendix")) results.push_back(run_appendix_suite());
    if (wanted("bound")) results.push_back(run_bound_suite());
    return results;
}

} // namespace pathlift
