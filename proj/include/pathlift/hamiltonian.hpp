#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "pathlift/errors.hpp"
#include "pathlift/manifold.hpp"
#include "pathlift/metric.hpp"
#include "pathlift/speed.hpp"

namespace pathlift {

/// Smooth stand-in for "not yet at the goal": 1 - exp(-B |x - goal|^2).
/// Zero at the goal, approaches 1 away from it; larger B sharpens it.
struct IndicatorParams {
    Vector goal;
    double sharpness = 50.0;
};

inline double smooth_indicator(const Vector& x, const IndicatorParams& ip) {
    return 1.0 - std::exp(-ip.sharpness * (x - ip.goal).squaredNorm());
}

inline Vector smooth_indicator_gradient(const Vector& x, const IndicatorParams& ip) {
    const Vector d = x - ip.goal;
    return (2.0 * ip.sharpness * std::exp(-ip.sharpness * d.squaredNorm())) * d;
}

/// H(x, p, t) = v(x,t) sqrt(p' A(x) p) - 1.
/// On flat terrain this is the eikonal Hamiltonian v|p| - 1.
inline double hamiltonian(const ManifoldModel& m, const SpeedModel& v,
                          const Vector& x, const Vector& p, double t) {
    const Vector g = m.gradient(x);
    return v.value(x, t) * std::sqrt(metric_quadratic(g, p)) - 1.0;
}

struct CostateUpdate {
    Vector w; // transformed costate, w = L(x)^T p
    Vector p;
};

/// Shrinkage step of the dual update: the minimizer of
///   sigma_dt * ind(x) * v(x,t) * |w| + 1/2 |w - beta|^2
/// followed by the change of variables back to p = (L^T)^{-1} w.
/// beta = 0 maps to w = 0 (the objective's minimizer there).
inline CostateUpdate prox_costate(const Vector& beta, const MetricFactor& factor,
                                  const Vector& x, double t, double sigma_dt,
                                  const IndicatorParams& ip, const SpeedModel& v) {
    CostateUpdate out;
    const double nb = beta.norm();
    const double threshold = sigma_dt * smooth_indicator(x, ip) * v.value(x, t);
    if (nb <= threshold || nb == 0.0) {
        out.w = Vector::Zero(beta.size());
        out.p = Vector::Zero(beta.size());
        return out;
    }
    out.w = (1.0 - threshold / nb) * beta;
    out.p = solve_upper_transpose(factor.L, out.w);
    return out;
}

inline CostateUpdate prox_costate(const Vector& beta, const Vector& x, double t,
                                  double sigma_dt, const IndicatorParams& ip,
                                  const ManifoldModel& m, const SpeedModel& v) {
    return prox_costate(beta, metric_factor(m, x), x, t, sigma_dt, ip, v);
}

/// Gradient in x of ind(x) * H(x, p, t), expanded by the product rule:
///
///   (v sqrt(Q) - 1) grad ind
///   + ind * sqrt(Q) * grad v
///   + ind * v * [ s^2 HM g - (1+|g|^2) s HM p ] / [ sqrt(Q) (1+|g|^2)^2 ]
///
/// with g = grad M, HM the Hessian of M, s = p'g, Q = p'Ap. The last term
/// is dropped when |p| < 1e-10; it is bounded and vanishes with p.
inline Vector grad_x_hamiltonian(const ManifoldModel& m, const SpeedModel& v,
                                 const Vector& x, const Vector& p, double t,
                                 const IndicatorParams& ip) {
    const Vector g = m.gradient(x);
    const double q = metric_quadratic(g, p);
    const double root = std::sqrt(q);
    const double speed = v.value(x, t);
    const double ind = smooth_indicator(x, ip);

    Vector out = (speed * root - 1.0) * smooth_indicator_gradient(x, ip);
    if (ind != 0.0) {
        out.noalias() += (ind * root) * v.gradient(x, t);
        if (p.norm() >= 1e-10) {
            const double s = p.dot(g);
            const double opg = 1.0 + g.squaredNorm();
            const Matrix hm = m.hessian(x);
            Vector root_grad = (s * s) * (hm * g);
            root_grad.noalias() -= (opg * s) * (hm * p);
            root_grad /= root * opg * opg;
            out.noalias() += (ind * speed) * root_grad;
        }
    }
    return out;
}

/// Identity approximation of the state prox; used while the path skeleton
/// is still being resolved.
inline Vector prox_state_passthrough(const Vector& nu) { return nu; }

/// Gradient-descent approximation of prox_{-tau_dt * ind * H(., p, t)}(nu):
/// from `start`, take `steps` iterations of
///   x <- x - eta * ( -tau_dt * grad_x(ind * H)(x, p, t) + (x - nu) ).
inline Vector prox_state_gd(const Vector& nu, const Vector& start, const Vector& p,
                            double t, double tau_dt, double eta, int steps,
                            const ManifoldModel& m, const SpeedModel& v,
                            const IndicatorParams& ip) {
    Vector x = start;
    for (int s = 0; s < steps; ++s) {
        const Vector step = tau_dt * grad_x_hamiltonian(m, v, x, p, t, ip) - (x - nu);
        x += eta * step;
        if (!x.allFinite())
            throw DivergenceError("prox_state_gd: non-finite iterate (descent rate too large?)", s);
    }
    return x;
}

} // namespace pathlift
