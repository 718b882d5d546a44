#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pathlift/errors.hpp"
#include "pathlift/hamiltonian.hpp"
#include "pathlift/manifold.hpp"
#include "pathlift/metric.hpp"
#include "pathlift/speed.hpp"

namespace pathlift {

/// Unit directions covering the sphere: a uniform angle lattice in 2-D, a
/// Fibonacci lattice in 3-D, normalized Gaussian draws above that (where
/// lattices are hopeless and the local polish earns its keep).
inline Matrix sphere_directions(int dim, int count, std::uint64_t seed = 0) {
    constexpr double pi = 3.14159265358979323846;
    Matrix dirs(dim, count);
    if (dim == 1) {
        for (int i = 0; i < count; ++i) dirs(0, i) = i % 2 == 0 ? 1.0 : -1.0;
        return dirs;
    }
    if (dim == 2) {
        for (int i = 0; i < count; ++i) {
            const double theta = 2.0 * pi * i / count;
            dirs(0, i) = std::cos(theta);
            dirs(1, i) = std::sin(theta);
        }
        return dirs;
    }
    if (dim == 3) {
        const double golden = pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double y = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
            dirs(0, i) = r * std::cos(golden * i);
            dirs(1, i) = y;
            dirs(2, i) = r * std::sin(golden * i);
        }
        return dirs;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < count; ++i) {
        Vector d(dim);
        do {
            for (int k = 0; k < dim; ++k) d[k] = gauss(rng);
        } while (d.norm() < 1e-8);
        dirs.col(i) = d / d.norm();
    }
    return dirs;
}

struct SphereMinResult {
    double min_value = 0.0;
    Vector argmin;
};

/// Brute-force minimum of the control objective
///   f(a) = v(x,t) * <a,p> / sqrt(1 + <grad M(x), a>^2) + 1
/// over the given unit directions, tightened by 50 steps of projected
/// gradient descent on the sphere. The negative of this minimum is the
/// Hamiltonian.
inline SphereMinResult sphere_min_objective(const Vector& x, const Vector& p,
                                            const ManifoldModel& m, const SpeedModel& v,
                                            double t, const Matrix& dirs) {
    if (dirs.cols() == 0) throw InputError("sphere_min_objective: empty sample set");
    const Vector g = m.gradient(x);
    const double speed = v.value(x, t);

    const auto objective = [&](const Vector& a) {
        const double s = g.dot(a);
        return speed * p.dot(a) / std::sqrt(1.0 + s * s) + 1.0;
    };

    SphereMinResult best;
    best.argmin = dirs.col(0);
    best.min_value = objective(best.argmin);
    for (Eigen::Index i = 1; i < dirs.cols(); ++i) {
        const double f = objective(dirs.col(i));
        if (f < best.min_value) {
            best.min_value = f;
            best.argmin = dirs.col(i);
        }
    }

    // Local polish with tangent-space steps and a crude backtracking rule.
    Vector a = best.argmin;
    double fa = best.min_value;
    double step = 0.1;
    for (int it = 0; it < 50; ++it) {
        const double s = g.dot(a);
        const double denom = std::pow(1.0 + s * s, 1.5);
        const Vector grad = speed * ((1.0 + s * s) * p - p.dot(a) * s * g) / denom;
        const Vector tangent = grad - a.dot(grad) * a;
        Vector cand = a - step * tangent;
        const double nc = cand.norm();
        if (nc < 1e-14) { step *= 0.5; continue; }
        cand /= nc;
        const double fc = objective(cand);
        if (fc < fa) {
            a = cand;
            fa = fc;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    if (fa < best.min_value) {
        best.min_value = fa;
        best.argmin = a;
    }
    return best;
}

/// The minimizing control direction in closed form,
///   a* = -[(1+|g|^2) p - <p,g> g] / sqrt(|p|^2 (1+|g|^2)^2 - <p,g>^2 (2+|g|^2)),
/// with g = grad M(x). Valid for any p != 0; the radicand is bounded below
/// by |p|^2, so linear dependence of p and g needs no special casing.
inline Vector closed_form_minimizer(const Vector& x, const Vector& p, const ManifoldModel& m) {
    if (p.norm() == 0.0) throw InputError("closed_form_minimizer: direction undefined for p = 0");
    const Vector g = m.gradient(x);
    const double g2 = g.squaredNorm();
    const double s = p.dot(g);
    const Vector numerator = (1.0 + g2) * p - s * g;
    const double radicand = p.squaredNorm() * (1.0 + g2) * (1.0 + g2) - s * s * (2.0 + g2);
    return -numerator / std::sqrt(radicand);
}

/// Nested grid search for argmin of objective(y) + 1/2 |y - nu|^2.
/// Each level shrinks the box by 10x around the incumbent, then a compass
/// search walks the incumbent down to ~1e-6 of the box. The polish step
/// matters near shrinkage ties, where the target sits in a kinked valley
/// that a pure lattice refinement drifts away from.
inline Vector numeric_prox(const std::function<double(const Vector&)>& objective,
                           const Vector& nu, double box_halfwidth, int levels = 3,
                           int points_per_axis = 21) {
    const auto n = nu.size();
    const auto total = [&](const Vector& y) {
        return objective(y) + 0.5 * (y - nu).squaredNorm();
    };
    Vector center = nu;
    double hw = box_halfwidth;
    Vector best = center;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<size_t>(n));

    for (int level = 0; level < levels; ++level) {
        best_f = std::numeric_limits<double>::infinity();
        Vector y(n);
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (Eigen::Index d = 0; d < n; ++d)
                y[d] = center[d] - hw + 2.0 * hw * idx[static_cast<size_t>(d)] / (points_per_axis - 1);
            const double f = total(y);
            if (f < best_f) {
                best_f = f;
                best = y;
            }
            Eigen::Index d = 0;
            for (; d < n; ++d) {
                if (++idx[static_cast<size_t>(d)] < points_per_axis) break;
                idx[static_cast<size_t>(d)] = 0;
            }
            if (d == n) break;
        }
        center = best;
        hw /= 10.0;
    }

    double step = 2.0 * hw * 10.0 / (points_per_axis - 1); // final lattice spacing
    const double min_step = box_halfwidth * 1e-6;
    long budget = 60000;
    Vector cand = best;
    while (step > min_step && budget > 0) {
        bool improved = false;
        for (Eigen::Index d = 0; d < n; ++d) {
            for (const double sgn : {1.0, -1.0}) {
                cand = best;
                cand[d] += sgn * step;
                --budget;
                const double fc = total(cand);
                if (fc < best_f) {
                    best_f = fc;
                    best = cand;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

/// Exact minimal travel time on flat terrain at constant speed.
inline double flat_exact_value(const Vector& x, const Vector& goal, double v0) {
    if (!(v0 > 0.0)) throw InputError("flat_exact_value: speed must be positive");
    return (x - goal).norm() / v0;
}

/// Central-difference gradient of a scalar field.
inline Vector fd_gradient(const std::function<double(const Vector&)>& field, const Vector& x,
                          double h) {
    if (!(h > 0.0)) throw InputError("fd_gradient: step must be positive");
    Vector g(x.size()), xp = x, xm = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        g[i] = (field(xp) - field(xm)) / (2.0 * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return g;
}

/// Largest-magnitude eigenvalue of a symmetric matrix.
inline double spectral_norm_sym(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Right-hand side of the pass-through error bound:
///   tau_dt * |p| * (|grad v(x,t)| + 2 |v(x,t)| * ||HM(x)||).
inline double prox_error_bound(const ManifoldModel& m, const SpeedModel& v, const Vector& x,
                               const Vector& p, double t, double tau_dt) {
    return tau_dt * p.norm() *
           (v.gradient(x, t).norm() +
            2.0 * std::abs(v.value(x, t)) * spectral_norm_sym(m.hessian(x)));
}

} // namespace pathlift
