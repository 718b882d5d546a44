#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pathlift/errors.hpp"
#include "pathlift/hamiltonian.hpp"
#include "pathlift/manifold.hpp"
#include "pathlift/metric.hpp"
#include "pathlift/speed.hpp"

namespace pathlift {

/// One minimal-time query: steer from `start` to `goal` within `horizon`
/// time units over the given terrain and speed field.
struct ProblemSpec {
    Vector start;
    Vector goal;
    double horizon = 0.0;
    ManifoldModel manifold;
    SpeedModel speed;
};

struct SolverConfig {
    int time_steps = 0;            // J; dt = horizon / J
    double sigma = 1.0;            // dual step
    double tau = 0.0;              // primal step; <= 0 means pick via estimate_tau
    double kappa = 1.0;            // extrapolation weight
    long max_iterations = 40000;   // K
    double tolerance = 1e-3;       // TOL on the sup-norm change
    long stage_switch = 2000;      // iterations of pass-through state updates
    double eta0 = 0.025;           // initial gradient descent rate
    double sharpness0 = 50.0;      // initial indicator sharpness B
    long anneal_period = 1000;     // iterations between eta/B adjustments
    double sharpness_max = 5000.0; // cap on B
    int gd_steps = 1;              // inner gradient descent iterations
    std::uint64_t seed = 0;
    double noise_std = 0.31622776601683794; // initialization noise, N(0, 0.1) as variance
};

/// State of one saddle-point solve. Columns are time steps: states x hold
/// x_0..x_J (x_0 pinned to the goal, x_J to the query point), costates p
/// and transformed costates w hold indices 1..J in columns 0..J-1, and z
/// is the extrapolated state sequence.
struct TrajectoryIterate {
    Matrix x;
    Matrix p;
    Matrix w;
    Matrix z;
};

struct PathSolution {
    double value = 0.0;              // u: approximate minimal travel time
    double value_no_indicator = 0.0; // same sum without the indicator weight
    Matrix states;                   // n x (J+1)
    Matrix costates;                 // n x J
    bool converged = false;
    long iterations = 0;
    double final_change = std::numeric_limits<double>::infinity();
    double wall_seconds = 0.0;
};

struct AnnealState {
    double eta;
    double sharpness;
    int stage; // 1: pass-through state prox, 2: gradient descent
};

/// Two-stage schedule. Stage 1 until `stage_switch`; afterwards the
/// descent rate halves and the sharpness grows by 50 every
/// `anneal_period` iterations (B capped at sharpness_max).
inline AnnealState anneal(long k, const SolverConfig& config) {
    if (k < config.stage_switch)
        return {config.eta0, config.sharpness0, 1};
    const long m = (k - config.stage_switch) / config.anneal_period;
    const double eta = config.eta0 * std::pow(0.5, static_cast<double>(m));
    const double b = std::min(config.sharpness_max,
                              config.sharpness0 + 50.0 * static_cast<double>(m));
    return {eta, b, 2};
}

namespace detail {

inline void validate(const ProblemSpec& spec, const SolverConfig& config) {
    const auto n = spec.start.size();
    if (n == 0 || spec.goal.size() != n)
        throw InputError("solver: start/goal dimension mismatch");
    if (spec.manifold.dim() != n)
        throw InputError("solver: manifold dimension " + std::to_string(spec.manifold.dim()) +
                         " does not match problem dimension " + std::to_string(n));
    if (!spec.start.allFinite() || !spec.goal.allFinite())
        throw InputError("solver: non-finite start or goal");
    if (!(spec.horizon > 0.0)) throw InputError("solver: horizon must be positive");
    if (config.time_steps < 1) throw InputError("solver: need at least one time step");
    if (!(config.sigma > 0.0)) throw InputError("solver: sigma must be positive");
}

inline std::vector<int> first_primes(int count) {
    std::vector<int> primes;
    primes.reserve(count);
    for (int c = 2; static_cast<int>(primes.size()) < count; ++c) {
        bool is_prime = true;
        for (int q : primes) {
            if (q * q > c) break;
            if (c % q == 0) { is_prime = false; break; }
        }
        if (is_prime) primes.push_back(c);
    }
    return primes;
}

inline double radical_inverse(int base, std::uint64_t index) {
    double inv_base = 1.0 / base, frac = inv_base, value = 0.0;
    while (index > 0) {
        value += static_cast<double>(index % base) * frac;
        index /= base;
        frac *= inv_base;
    }
    return value;
}

} // namespace detail

/// Step-size heuristic: sigma is fixed and tau is chosen against an
/// estimate of G^2 = sup |grad M|^2, sampled over the bounding box of
/// start/goal (inflated by 50%, Halton points) plus the straight segment
/// between them. A user-supplied tau (> 0) wins.
inline double estimate_tau(const ProblemSpec& spec, const SolverConfig& config) {
    if (config.tau > 0.0) return config.tau;

    const auto n = spec.start.size();
    const Vector lo0 = spec.start.cwiseMin(spec.goal);
    const Vector hi0 = spec.start.cwiseMax(spec.goal);
    const Vector pad = 0.25 * (hi0 - lo0);
    const Vector lo = lo0 - pad;
    const Vector width = (hi0 + pad) - lo;

    double g2_max = 0.0;
    const auto primes = detail::first_primes(static_cast<int>(n));
    const std::uint64_t box_samples = n > 10 ? 1000 : 10000;
    Vector x(n);
    for (std::uint64_t i = 1; i <= box_samples; ++i) {
        for (Eigen::Index d = 0; d < n; ++d)
            x[d] = lo[d] + width[d] * detail::radical_inverse(primes[d], i);
        g2_max = std::max(g2_max, spec.manifold.gradient(x).squaredNorm());
    }
    const int segment_samples = 256;
    for (int i = 0; i <= segment_samples; ++i) {
        const double s = static_cast<double>(i) / segment_samples;
        x = spec.goal + s * (spec.start - spec.goal);
        g2_max = std::max(g2_max, spec.manifold.gradient(x).squaredNorm());
    }

    const double safety = 0.9;
    return safety / (4.0 * config.sigma * (1.0 + g2_max));
}

/// Straight-line states from goal to query point with optional noise on
/// the interior nodes, noisy costates, z = x, and w = L(x_j)^T p_j.
inline TrajectoryIterate init_trajectory(const ProblemSpec& spec, const SolverConfig& config,
                                         std::mt19937_64& rng) {
    detail::validate(spec, config);
    const int steps = config.time_steps;
    const auto n = spec.start.size();

    TrajectoryIterate iter;
    iter.x.resize(n, steps + 1);
    iter.p.resize(n, steps);
    iter.w.resize(n, steps);

    std::normal_distribution<double> noise(0.0, config.noise_std > 0.0 ? config.noise_std : 1.0);
    const bool noisy = config.noise_std > 0.0;

    iter.x.col(0) = spec.goal;
    iter.x.col(steps) = spec.start;
    for (int j = 1; j < steps; ++j) {
        const double s = static_cast<double>(j) / steps;
        iter.x.col(j) = spec.goal + s * (spec.start - spec.goal);
        if (noisy)
            for (Eigen::Index d = 0; d < n; ++d) iter.x(d, j) += noise(rng);
    }
    for (int j = 0; j < steps; ++j)
        for (Eigen::Index d = 0; d < n; ++d) iter.p(d, j) = noisy ? noise(rng) : 0.0;

    iter.z = iter.x;
    MetricFactor factor;
    for (int j = 1; j <= steps; ++j) {
        metric_factor_into(spec.manifold, iter.x.col(j), factor);
        iter.w.col(j - 1).noalias() = factor.L.transpose() * iter.p.col(j - 1);
    }
    return iter;
}

/// One primal-dual iteration, in place. Costates first (shrinkage of the
/// transformed variable), then states (pass-through or gradient descent
/// per the stage schedule) with the endpoints pinned, then extrapolation.
inline void pdhg_step(TrajectoryIterate& iter, const ProblemSpec& spec,
                      const SolverConfig& config, long k) {
    const int steps = config.time_steps;
    const double dt = spec.horizon / steps;
    const double sigma_dt = config.sigma * dt;
    const double tau_dt = config.tau * dt;
    const AnnealState schedule = anneal(k, config);
    const IndicatorParams ip{spec.goal, schedule.sharpness};

    MetricFactor factor;
    Vector diff(spec.start.size()), beta(spec.start.size()), nu(spec.start.size());

    for (int j = 1; j <= steps; ++j) {
        const double tj = j * dt;
        metric_factor_into(spec.manifold, iter.x.col(j), factor);
        diff = iter.z.col(j) - iter.z.col(j - 1);
        beta = iter.w.col(j - 1) + config.sigma * solve_lower(factor.L, diff);
        const CostateUpdate upd =
            prox_costate(beta, factor, iter.x.col(j), tj, sigma_dt, ip, spec.speed);
        iter.w.col(j - 1) = upd.w;
        iter.p.col(j - 1) = upd.p;
    }

    iter.x.col(0) = spec.goal; // prox of the goal indicator
    for (int j = 1; j < steps; ++j) {
        const double tj = j * dt;
        nu = iter.x.col(j) - config.tau * (iter.p.col(j - 1) - iter.p.col(j));
        if (schedule.stage == 1) {
            iter.z.col(j) = iter.x.col(j); // stash x_j^k before overwriting
            iter.x.col(j) = prox_state_passthrough(nu);
        } else {
            const Vector next = prox_state_gd(nu, iter.x.col(j), iter.p.col(j - 1), tj, tau_dt,
                                              schedule.eta, config.gd_steps, spec.manifold,
                                              spec.speed, ip);
            iter.z.col(j) = iter.x.col(j);
            iter.x.col(j) = next;
        }
    }
    iter.x.col(steps) = spec.start; // pin the query point

    // z currently holds x^k at interior columns; extrapolate.
    iter.z.col(0) = iter.x.col(0);
    iter.z.col(steps) = iter.x.col(steps);
    for (int j = 1; j < steps; ++j)
        iter.z.col(j) = iter.x.col(j) + config.kappa * (iter.x.col(j) - iter.z.col(j));

    if (!iter.x.allFinite() || !iter.p.allFinite() || !iter.w.allFinite())
        throw DivergenceError("pdhg_step: non-finite iterate", k);
}

/// Sup-norm of the state and costate updates between two iterates.
inline double convergence_change(const TrajectoryIterate& prev, const TrajectoryIterate& next) {
    const double dx = (next.x - prev.x).cwiseAbs().maxCoeff();
    const double dp = (next.p - prev.p).cwiseAbs().maxCoeff();
    return std::max(dx, dp);
}

/// Terminal cost: the convex indicator of the goal. The solver pins x_0
/// to the goal, so along solver output this is identically zero.
inline double terminal_cost(const Vector& x0, const Vector& goal) {
    return x0 == goal ? 0.0 : std::numeric_limits<double>::infinity();
}

/// u = g(x_0) + sum_j <p_j, x_j - x_{j-1}> - dt * ind(x_j) * H(x_j, p_j, t_j).
/// `sharpness` selects the indicator B in effect (the annealed value at
/// termination); pass apply_indicator = false for the unweighted sum.
inline double extract_value(const TrajectoryIterate& iter, const ProblemSpec& spec,
                            const SolverConfig& config, double sharpness,
                            bool apply_indicator = true) {
    const int steps = config.time_steps;
    const double dt = spec.horizon / steps;
    const IndicatorParams ip{spec.goal, sharpness};
    double u = terminal_cost(iter.x.col(0), spec.goal);
    for (int j = 1; j <= steps; ++j) {
        const double tj = j * dt;
        const double h =
            hamiltonian(spec.manifold, spec.speed, iter.x.col(j), iter.p.col(j - 1), tj);
        const double weight = apply_indicator ? smooth_indicator(iter.x.col(j), ip) : 1.0;
        u += iter.p.col(j - 1).dot(iter.x.col(j) - iter.x.col(j - 1)) - dt * weight * h;
    }
    return u;
}

/// Full solve: initialize, iterate pdhg_step under the anneal schedule
/// until the change drops below tolerance or the iteration budget runs
/// out. Non-convergence is reported through the flag, not an error.
inline PathSolution solve_path(const ProblemSpec& spec, const SolverConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    detail::validate(spec, config);

    SolverConfig resolved = config;
    resolved.tau = estimate_tau(spec, config);

    std::mt19937_64 rng(resolved.seed);
    TrajectoryIterate iter = init_trajectory(spec, resolved, rng);
    TrajectoryIterate prev;

    PathSolution sol;
    long k = 0;
    for (; k < resolved.max_iterations; ++k) {
        prev = iter;
        pdhg_step(iter, spec, resolved, k);
        sol.final_change = convergence_change(prev, iter);
        if (sol.final_change < resolved.tolerance) {
            sol.converged = true;
            ++k;
            break;
        }
    }
    sol.iterations = k;

    const double sharpness = anneal(k > 0 ? k - 1 : 0, resolved).sharpness;
    sol.value = extract_value(iter, spec, resolved, sharpness, true);
    sol.value_no_indicator = extract_value(iter, spec, resolved, sharpness, false);
    sol.states = std::move(iter.x);
    sol.costates = std::move(iter.p);
    sol.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

/// Advisory checks that do not block a solve.
inline std::vector<std::string> problem_warnings(const ProblemSpec& spec) {
    std::vector<std::string> warnings;
    double vmax = 0.0;
    const int samples = 64;
    for (int i = 0; i <= samples; ++i) {
        const double s = static_cast<double>(i) / samples;
        const Vector x = spec.goal + s * (spec.start - spec.goal);
        vmax = std::max(vmax, spec.speed.value(x, 0.0));
    }
    if (vmax > 0.0) {
        const double lower_bound = (spec.start - spec.goal).norm() / vmax;
        if (spec.horizon < lower_bound)
            warnings.push_back("horizon " + std::to_string(spec.horizon) +
                               " is below the straight-line travel bound " +
                               std::to_string(lower_bound) + "; the goal may be unreachable");
    }
    return warnings;
}

} // namespace pathlift
