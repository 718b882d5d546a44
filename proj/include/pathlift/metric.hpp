#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "pathlift/errors.hpp"
#include "pathlift/manifold.hpp"

namespace pathlift {

/// p' A p for A = I - gg^T/(1+|g|^2) without forming A.
/// Clamped at zero: the exact value is nonnegative, roundoff is not.
inline double metric_quadratic(const Vector& grad, const Vector& p) {
    const double s = grad.dot(p);
    const double q = p.squaredNorm() - s * s / (1.0 + grad.squaredNorm());
    return q > 0.0 ? q : 0.0;
}

/// A(x) = I - gg^T/(1+|g|^2) with g = grad M(x). Symmetric, positive
/// definite; eigenvalues are 1 (multiplicity n-1) and 1/(1+|g|^2).
inline Matrix metric_matrix(const ManifoldModel& m, const Vector& x) {
    if (!x.allFinite()) throw InputError("metric_matrix: non-finite point");
    const Vector g = m.gradient(x);
    if (!g.allFinite()) throw InputError("metric_matrix: non-finite manifold gradient");
    Matrix a = Matrix::Identity(g.size(), g.size());
    a.noalias() -= (g * g.transpose()) / (1.0 + g.squaredNorm());
    return a;
}

inline void cholesky_into(const Matrix& a, Matrix& l) {
    const auto n = a.rows();
    l.resize(n, n);
    l.setZero();
    for (Eigen::Index j = 0; j < n; ++j) {
        const double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(pivot > 0.0))
            throw FactorizationError("cholesky_factor: non-positive pivot at column " +
                                     std::to_string(j));
        l(j, j) = std::sqrt(pivot);
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double s = a(i, j) - l.row(i).head(j).dot(l.row(j).head(j));
            l(i, j) = s / l(j, j);
        }
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix,
/// L L^T = A with positive diagonal. Throws FactorizationError when a
/// pivot is not strictly positive.
inline Matrix cholesky_factor(const Matrix& a) {
    Matrix l;
    cholesky_into(a, l);
    return l;
}

/// Forward substitution, L y = b.
inline Vector solve_lower(const Matrix& l, const Vector& b) {
    if ((l.diagonal().array() == 0.0).any())
        throw FactorizationError("solve_lower: zero diagonal");
    return l.triangularView<Eigen::Lower>().solve(b);
}

/// Back substitution against the transpose, L^T y = b.
inline Vector solve_upper_transpose(const Matrix& l, const Vector& b) {
    if ((l.diagonal().array() == 0.0).any())
        throw FactorizationError("solve_upper_transpose: zero diagonal");
    return l.transpose().triangularView<Eigen::Upper>().solve(b);
}

/// The metric matrix at a point together with its Cholesky factor.
/// L -> I as grad M -> 0, which keeps the factor invertible on flat
/// stretches of terrain.
struct MetricFactor {
    Matrix A;
    Matrix L;
    double grad_norm2 = 0.0;
};

namespace detail {

/// Closed-form 2-D factor of A(x). With g = (Mx, My), g2 = |g|^2:
///   L = 1/sqrt(1+g2) * [ sqrt(1+My^2)            0
///                        -Mx My/sqrt(1+My^2)     sqrt((1+g2)/(1+My^2)) ]
inline void cholesky_2d(const Vector& g, Matrix& l) {
    const double mx = g[0], my = g[1];
    const double g2 = mx * mx + my * my;
    const double r = std::sqrt(1.0 + g2);
    const double c = std::sqrt(1.0 + my * my);
    l.resize(2, 2);
    l(0, 0) = c / r;
    l(0, 1) = 0.0;
    l(1, 0) = -mx * my / (c * r);
    l(1, 1) = 1.0 / c;
}

} // namespace detail

inline void metric_factor_into(const ManifoldModel& m, const Vector& x, MetricFactor& f) {
    const Vector g = m.gradient(x);
    if (!g.allFinite()) throw InputError("metric_factor: non-finite manifold gradient");
    f.grad_norm2 = g.squaredNorm();
    const auto n = g.size();
    f.A = Matrix::Identity(n, n);
    f.A.noalias() -= (g * g.transpose()) / (1.0 + f.grad_norm2);
    if (n == 2) {
        detail::cholesky_2d(g, f.L);
    } else {
        cholesky_into(f.A, f.L);
    }
}

inline MetricFactor metric_factor(const ManifoldModel& m, const Vector& x) {
    MetricFactor f;
    metric_factor_into(m, x, f);
    return f;
}

/// Length of the polyline lifted onto the manifold:
/// sum_j sqrt(|x_j - x_{j-1}|^2 + (M(x_j) - M(x_{j-1}))^2).
/// Columns of `path` are points.
inline double manifold_arclength(const ManifoldModel& m, const Matrix& path) {
    if (path.cols() < 2) throw InputError("manifold_arclength: need at least 2 points");
    if (!path.allFinite()) throw InputError("manifold_arclength: non-finite point");
    double len = 0.0;
    double z_prev = m.value(path.col(0));
    for (Eigen::Index j = 1; j < path.cols(); ++j) {
        const double z = m.value(path.col(j));
        const double dz = z - z_prev;
        len += std::sqrt((path.col(j) - path.col(j - 1)).squaredNorm() + dz * dz);
        z_prev = z;
    }
    return len;
}

} // namespace pathlift
