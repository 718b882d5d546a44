#pragma once

#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "pathlift/errors.hpp"
#include "pathlift/manifold.hpp"

namespace pathlift {

/// Local travel speed v(x, t) > 0 and its spatial gradient.
///
/// Builtins are time-independent; a generic model takes (x, t) callbacks
/// and differentiates in x by central differences when no gradient
/// callback is supplied.
class SpeedModel {
public:
    enum class Kind { Constant, QuadLeft, Generic };

    using ValueFn = std::function<double(const Vector&, double)>;
    using GradFn = std::function<Vector(const Vector&, double)>;

    static SpeedModel constant(double c) {
        SpeedModel v;
        v.kind_ = Kind::Constant;
        v.c_ = c;
        return v;
    }

    /// v(x) = 1 + (x1 - 1)^2: slow near the plane x1 = 1, fast to its left.
    static SpeedModel quad_left() {
        SpeedModel v;
        v.kind_ = Kind::QuadLeft;
        return v;
    }

    static SpeedModel from_callbacks(ValueFn value, GradFn grad = nullptr,
                                     double fd_step = 1e-6) {
        SpeedModel v;
        v.kind_ = Kind::Generic;
        v.value_ = std::move(value);
        v.grad_ = std::move(grad);
        v.fd_step_ = fd_step;
        return v;
    }

    Kind kind() const { return kind_; }

    double value(const Vector& x, double t) const {
        switch (kind_) {
            case Kind::Constant:
                return c_;
            case Kind::QuadLeft: {
                const double d = x[0] - 1.0;
                return 1.0 + d * d;
            }
            case Kind::Generic:
                return value_(x, t);
        }
        return c_;
    }

    Vector gradient(const Vector& x, double t) const {
        switch (kind_) {
            case Kind::Constant:
                return Vector::Zero(x.size());
            case Kind::QuadLeft: {
                Vector g = Vector::Zero(x.size());
                g[0] = 2.0 * (x[0] - 1.0);
                return g;
            }
            case Kind::Generic: {
                if (grad_) return grad_(x, t);
                Vector g(x.size()), xp = x, xm = x;
                for (int i = 0; i < x.size(); ++i) {
                    xp[i] = x[i] + fd_step_;
                    xm[i] = x[i] - fd_step_;
                    g[i] = (value_(xp, t) - value_(xm, t)) / (2.0 * fd_step_);
                    xp[i] = x[i];
                    xm[i] = x[i];
                }
                return g;
            }
        }
        return Vector::Zero(x.size());
    }

private:
    Kind kind_ = Kind::Constant;
    double c_ = 1.0;
    ValueFn value_;
    GradFn grad_;
    double fd_step_ = 1e-6;
};

/// Parse the speed selection grammar:
///   const:c=<float>
///   quadleft
inline SpeedModel parse_speed(const std::string& text) {
    if (text == "quadleft") return SpeedModel::quad_left();
    if (text.rfind("const:c=", 0) == 0) {
        const double c = detail::parse_comma_floats(text.substr(8), "constant speed").at(0);
        if (!(c > 0.0)) throw ManifestError("speed must be positive, got " + text);
        return SpeedModel::constant(c);
    }
    throw ManifestError("unknown speed '" + text + "'");
}

} // namespace pathlift
