#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pathlift/errors.hpp"

namespace pathlift {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Terrain given as the graph (x, M(x)) of a scalar height function.
///
/// Builtin kinds carry analytic gradients and Hessians; a generic model
/// wraps an arbitrary height callback and differentiates it with central
/// differences (step fd_grad_step for the gradient, fd_hess_step for the
/// Hessian). Immutable after construction, cheap to copy, safe to share
/// across concurrent solves.
class ManifoldModel {
public:
    enum class Kind { Flat, Sinusoid, Gaussian, Generic };

    using HeightFn = std::function<double(const Vector&)>;

    static ManifoldModel flat(int dim) {
        ManifoldModel m;
        m.dim_ = dim;
        m.kind_ = Kind::Flat;
        return m;
    }

    /// a*sin(pi*x1)*cos(pi*x2); two-dimensional by construction.
    static ManifoldModel sinusoid(double amplitude) {
        ManifoldModel m;
        m.dim_ = 2;
        m.kind_ = Kind::Sinusoid;
        m.amplitude_ = amplitude;
        return m;
    }

    /// amplitude * exp(-|x - center|^2), any dimension.
    static ManifoldModel gaussian(double amplitude, Vector center) {
        ManifoldModel m;
        m.dim_ = static_cast<int>(center.size());
        m.kind_ = Kind::Gaussian;
        m.amplitude_ = amplitude;
        m.center_ = std::move(center);
        return m;
    }

    /// Height-callback-only model; derivatives come from finite differences.
    /// Assumes the height is C^2 near the points it will be queried at.
    static ManifoldModel from_height(int dim, HeightFn height,
                                     double fd_grad_step = 1e-5,
                                     double fd_hess_step = 1e-4) {
        ManifoldModel m;
        m.dim_ = dim;
        m.kind_ = Kind::Generic;
        m.height_ = std::move(height);
        m.fd_grad_step_ = fd_grad_step;
        m.fd_hess_step_ = fd_hess_step;
        return m;
    }

    int dim() const { return dim_; }
    Kind kind() const { return kind_; }
    double amplitude() const { return amplitude_; }

    double value(const Vector& x) const {
        switch (kind_) {
            case Kind::Flat:
                return 0.0;
            case Kind::Sinusoid:
                return amplitude_ * std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
            case Kind::Gaussian:
                return amplitude_ * std::exp(-(x - center_).squaredNorm());
            case Kind::Generic:
                return height_(x);
        }
        return 0.0;
    }

    Vector gradient(const Vector& x) const {
        switch (kind_) {
            case Kind::Flat:
                return Vector::Zero(dim_);
            case Kind::Sinusoid: {
                Vector g(2);
                const double s1 = std::sin(kPi * x[0]), c1 = std::cos(kPi * x[0]);
                const double s2 = std::sin(kPi * x[1]), c2 = std::cos(kPi * x[1]);
                g[0] = amplitude_ * kPi * c1 * c2;
                g[1] = -amplitude_ * kPi * s1 * s2;
                return g;
            }
            case Kind::Gaussian: {
                const Vector d = x - center_;
                return (-2.0 * amplitude_ * std::exp(-d.squaredNorm())) * d;
            }
            case Kind::Generic:
                return fd_gradient_(x);
        }
        return Vector::Zero(dim_);
    }

    Matrix hessian(const Vector& x) const {
        switch (kind_) {
            case Kind::Flat:
                return Matrix::Zero(dim_, dim_);
            case Kind::Sinusoid: {
                Matrix h(2, 2);
                const double s1 = std::sin(kPi * x[0]), c1 = std::cos(kPi * x[0]);
                const double s2 = std::sin(kPi * x[1]), c2 = std::cos(kPi * x[1]);
                const double pi2 = kPi * kPi;
                h(0, 0) = -amplitude_ * pi2 * s1 * c2;
                h(1, 1) = -amplitude_ * pi2 * s1 * c2;
                h(0, 1) = h(1, 0) = -amplitude_ * pi2 * c1 * s2;
                return h;
            }
            case Kind::Gaussian: {
                const Vector d = x - center_;
                const double e = amplitude_ * std::exp(-d.squaredNorm());
                Matrix h = (4.0 * e) * (d * d.transpose());
                h.diagonal().array() -= 2.0 * e;
                return h;
            }
            case Kind::Generic:
                return fd_hessian_(x);
        }
        return Matrix::Zero(dim_, dim_);
    }

private:
    static constexpr double kPi = 3.14159265358979323846;

    Vector fd_gradient_(const Vector& x) const {
        const double h = fd_grad_step_;
        Vector g(dim_), xp = x, xm = x;
        for (int i = 0; i < dim_; ++i) {
            xp[i] = x[i] + h;
            xm[i] = x[i] - h;
            g[i] = (height_(xp) - height_(xm)) / (2.0 * h);
            xp[i] = x[i];
            xm[i] = x[i];
        }
        return g;
    }

    Matrix fd_hessian_(const Vector& x) const {
        const double h = fd_hess_step_;
        Matrix hess(dim_, dim_);
        const double f0 = height_(x);
        Vector xs = x;
        for (int i = 0; i < dim_; ++i) {
            xs[i] = x[i] + h;
            const double fp = height_(xs);
            xs[i] = x[i] - h;
            const double fm = height_(xs);
            xs[i] = x[i];
            hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
        }
        for (int i = 0; i < dim_; ++i) {
            for (int j = i + 1; j < dim_; ++j) {
                xs[i] = x[i] + h; xs[j] = x[j] + h;
                const double fpp = height_(xs);
                xs[j] = x[j] - h;
                const double fpm = height_(xs);
                xs[i] = x[i] - h; xs[j] = x[j] + h;
                const double fmp = height_(xs);
                xs[j] = x[j] - h;
                const double fmm = height_(xs);
                xs[i] = x[i]; xs[j] = x[j];
                hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            }
        }
        return hess;
    }

    int dim_ = 0;
    Kind kind_ = Kind::Flat;
    double amplitude_ = 0.0;
    Vector center_;
    HeightFn height_;
    double fd_grad_step_ = 1e-5;
    double fd_hess_step_ = 1e-4;
};

namespace detail {

inline std::vector<double> parse_comma_floats(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ManifestError("bad float '" + item + "' in " + what);
        }
    }
    if (out.empty()) throw ManifestError("empty float list in " + what);
    return out;
}

} // namespace detail

/// Parse the manifold selection grammar:
///   flat
///   sinusoid:a=<float>
///   gaussian:amp=<float>,center=<comma-floats>
/// `dim` is the problem dimension the model must match.
inline ManifoldModel parse_manifold(const std::string& text, int dim) {
    if (text == "flat") return ManifoldModel::flat(dim);

    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : text.substr(colon + 1);

    if (head == "sinusoid") {
        if (args.rfind("a=", 0) != 0)
            throw ManifestError("sinusoid manifold wants 'sinusoid:a=<float>', got '" + text + "'");
        const double a = detail::parse_comma_floats(args.substr(2), "sinusoid amplitude").at(0);
        if (dim != 2)
            throw ManifestError("sinusoid manifold is 2-D; problem dimension is " + std::to_string(dim));
        return ManifoldModel::sinusoid(a);
    }
    if (head == "gaussian") {
        const std::string amp_key = "amp=";
        const std::string ctr_key = ",center=";
        const auto ctr = args.find(ctr_key);
        if (args.rfind(amp_key, 0) != 0 || ctr == std::string::npos)
            throw ManifestError(
                "gaussian manifold wants 'gaussian:amp=<float>,center=<comma-floats>', got '" + text + "'");
        const double amp =
            detail::parse_comma_floats(args.substr(amp_key.size(), ctr - amp_key.size()),
                                       "gaussian amplitude").at(0);
        const auto c = detail::parse_comma_floats(args.substr(ctr + ctr_key.size()), "gaussian center");
        if (static_cast<int>(c.size()) != dim)
            throw ManifestError("gaussian center has " + std::to_string(c.size()) +
                                " components; problem dimension is " + std::to_string(dim));
        return ManifoldModel::gaussian(amp, Eigen::Map<const Vector>(c.data(), c.size()));
    }
    throw ManifestError("unknown manifold '" + text + "'");
}

} // namespace pathlift
