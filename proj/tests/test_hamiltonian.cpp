#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pathlift/hamiltonian.hpp"
#include "pathlift/oracle.hpp"
#include "pathlift/verify.hpp"

using namespace pathlift;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Vector random_vec(std::mt19937_64& rng, int n, double halfwidth) {
    std::uniform_real_distribution<double> u(-halfwidth, halfwidth);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

const Vector kFarGoal = vec2(1e3, 1e3); // indicator == 1 to machine precision

} // namespace

TEST_CASE("hamiltonian: p = 0 gives -1, flat case is eikonal") {
    const SpeedModel unit = SpeedModel::constant(1.0);
    const ManifoldModel sin1 = ManifoldModel::sinusoid(1.0);
    REQUIRE(hamiltonian(sin1, unit, vec2(0.3, -0.7), Vector::Zero(2), 0.0) == -1.0);

    const ManifoldModel flat = ManifoldModel::flat(2);
    REQUIRE(hamiltonian(flat, unit, vec2(5.0, 5.0), vec2(3.0, 4.0), 0.0) ==
            Catch::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("hamiltonian: eikonal reduction on flat terrain") {
    std::mt19937_64 rng(21);
    const ManifoldModel flat = ManifoldModel::flat(3);
    const SpeedModel speeds[] = {SpeedModel::constant(2.5), SpeedModel::quad_left()};
    for (int i = 0; i < 200; ++i) {
        const Vector x = random_vec(rng, 3, 2.0);
        const Vector p = random_vec(rng, 3, 3.0);
        for (const auto& v : speeds) {
            const double h = hamiltonian(flat, v, x, p, 0.0);
            const double eikonal = v.value(x, 0.0) * p.norm() - 1.0;
            REQUIRE(std::abs(h - eikonal) <= 1e-14 * std::max(1.0, std::abs(eikonal)));
        }
    }
}

TEST_CASE("hamiltonian agrees with the sphere brute force on the sinusoid") {
    std::mt19937_64 rng(22);
    const ManifoldModel m = ManifoldModel::sinusoid(1.0);
    const SpeedModel v = SpeedModel::constant(1.0);
    const Matrix dirs = sphere_directions(2, 20000);
    for (int i = 0; i < 25; ++i) {
        const Vector x = random_vec(rng, 2, 1.5);
        Vector p = random_vec(rng, 2, 2.0);
        if (p.norm() < 0.1) p = vec2(1.0, 0.5);
        const SphereMinResult brute = sphere_min_objective(x, p, m, v, 0.0, dirs);
        const double h = hamiltonian(m, v, x, p, 0.0);
        REQUIRE(std::abs(h - (-brute.min_value)) <= 1e-3);
    }
}

TEST_CASE("smooth indicator values and limits") {
    const IndicatorParams ip{vec2(0.5, -0.5), 50.0};
    REQUIRE(smooth_indicator(vec2(0.5, -0.5), ip) == 0.0);
    REQUIRE(smooth_indicator(vec2(1000.5, -0.5), ip) > 1.0 - 1e-12);

    // B = 50, |x - goal|^2 = 0.02: 1 - exp(-1)
    const Vector x = vec2(0.5 + std::sqrt(0.02), -0.5);
    REQUIRE(smooth_indicator(x, ip) == Catch::Approx(0.6321205588285577).epsilon(1e-12));
}

TEST_CASE("smooth indicator is monotone in the distance and below 1") {
    std::mt19937_64 rng(23);
    const IndicatorParams ip{vec2(0.0, 0.0), 37.0};
    double prev = -1.0;
    for (int i = 0; i <= 60; ++i) {
        const double r = 0.05 * i;
        const double val = smooth_indicator(vec2(r, 0.0), ip);
        REQUIRE(val >= prev);
        REQUIRE(val >= 0.0);
        REQUIRE(val < 1.0 + 1e-15);
        prev = val;
    }
    for (int i = 0; i < 100; ++i) {
        const Vector x = random_vec(rng, 2, 3.0);
        const Vector fd = fd_gradient(
            [&](const Vector& y) { return smooth_indicator(y, ip); }, x, 1e-6);
        REQUIRE((smooth_indicator_gradient(x, ip) - fd).norm() <= 1e-5);
    }
}

TEST_CASE("prox_costate: shrinkage branches") {
    const ManifoldModel flat = ManifoldModel::flat(2);
    const SpeedModel unit = SpeedModel::constant(1.0);
    const IndicatorParams far{kFarGoal, 50.0};

    // Below the threshold everything shrinks away.
    const Vector small_beta = vec2(0.05, 0.0);
    const CostateUpdate full = prox_costate(small_beta, vec2(0, 0), 0.0, 0.5, far, flat, unit);
    REQUIRE(full.w.isZero(0.0));
    REQUIRE(full.p.isZero(0.0));

    // At the goal the indicator vanishes: no shrinkage at all.
    const IndicatorParams at{vec2(0.0, 0.0), 50.0};
    const Vector beta = vec2(0.3, -0.2);
    const CostateUpdate none = prox_costate(beta, vec2(0.0, 0.0), 0.0, 0.5, at, flat, unit);
    REQUIRE((none.w - beta).norm() == 0.0);

    // Zero input maps to zero.
    const CostateUpdate zero = prox_costate(Vector::Zero(2), vec2(0, 0), 0.0, 0.1, far, flat, unit);
    REQUIRE(zero.w.isZero(0.0));
}

TEST_CASE("prox_costate: sigma_dt = 0.1 shrinks (1,0) to (0.9,0), grid-checked") {
    const ManifoldModel flat = ManifoldModel::flat(2);
    const SpeedModel unit = SpeedModel::constant(1.0);
    const IndicatorParams far{kFarGoal, 50.0};
    const Vector beta = vec2(1.0, 0.0);
    const double sigma_dt = 0.1;

    const CostateUpdate upd = prox_costate(beta, vec2(0, 0), 0.0, sigma_dt, far, flat, unit);
    REQUIRE((upd.w - vec2(0.9, 0.0)).norm() <= 1e-15);
    REQUIRE((upd.p - upd.w).norm() == 0.0); // flat: L = I

    const double threshold = sigma_dt * smooth_indicator(vec2(0, 0), far) * 1.0;
    const Vector grid = numeric_prox(
        [&](const Vector& w) { return threshold * w.norm(); }, beta, 1.3, 6, 21);
    REQUIRE((grid - upd.w).norm() <= 1e-6);
}

TEST_CASE("prox_costate: transformed costate matches a direct solve") {
    std::mt19937_64 rng(24);
    const ManifoldModel m = ManifoldModel::sinusoid(1.0);
    const SpeedModel v = SpeedModel::quad_left();
    const IndicatorParams far{kFarGoal, 50.0};
    for (int i = 0; i < 50; ++i) {
        const Vector x = random_vec(rng, 2, 1.5);
        const Vector beta = random_vec(rng, 2, 2.0);
        const CostateUpdate upd = prox_costate(beta, x, 0.7, 0.05, far, m, v);
        const MetricFactor f = metric_factor(m, x);
        REQUIRE((f.L.transpose() * upd.p - upd.w).norm() <= 1e-12);
    }
}

TEST_CASE("shrinkage dominates random candidates and the grid prox") {
    const SuiteResult r = run_prox_suite(99, 200, 2000);
    INFO(r.detail);
    REQUIRE(r.passed);
}

TEST_CASE("grad_x_hamiltonian: degenerate closed forms") {
    const ManifoldModel flat = ManifoldModel::flat(2);
    const SpeedModel unit = SpeedModel::constant(1.0);
    const IndicatorParams ip{vec2(0.4, 0.1), 50.0};
    const Vector x = vec2(-0.3, 0.8);

    const Vector p = vec2(1.4, -0.7);
    const Vector expected = (p.norm() - 1.0) * smooth_indicator_gradient(x, ip);
    REQUIRE((grad_x_hamiltonian(flat, unit, x, p, 0.0, ip) - expected).norm() <= 1e-13);

    const Vector at_zero = grad_x_hamiltonian(flat, unit, x, Vector::Zero(2), 0.0, ip);
    REQUIRE((at_zero + smooth_indicator_gradient(x, ip)).norm() <= 1e-15);
}

TEST_CASE("grad_x_hamiltonian matches finite differences") {
    const SuiteResult r = run_gradient_suite(98, 15);
    INFO(r.detail);
    REQUIRE(r.passed);
    REQUIRE(r.worst_error <= 1e-4);
}

TEST_CASE("prox_state_passthrough is the identity") {
    REQUIRE((prox_state_passthrough(vec2(1.0, 2.0)) - vec2(1.0, 2.0)).norm() == 0.0);
    REQUIRE(prox_state_passthrough(Vector::Zero(3)).isZero(0.0));
}

TEST_CASE("prox_state_gd: fixed points") {
    const ManifoldModel flat = ManifoldModel::flat(2);
    const SpeedModel unit = SpeedModel::constant(1.0);
    const Vector nu = vec2(0.3, -0.9);

    // Sharpness 0 kills the indicator gradient; with p = 0 and start = nu
    // nothing moves, bitwise.
    const IndicatorParams blunt{vec2(0, 0), 0.0};
    const Vector r1 = prox_state_gd(nu, nu, Vector::Zero(2), 0.0, 0.5, 0.1, 25, flat, unit, blunt);
    REQUIRE((r1 - nu).norm() == 0.0);

    // tau_dt = 0: prox of the zero function.
    const IndicatorParams ip{vec2(0, 0), 50.0};
    const Vector r2 = prox_state_gd(nu, nu, vec2(1.0, 1.0), 0.0, 0.0, 0.1, 40, flat, unit, ip);
    REQUIRE((r2 - nu).norm() == 0.0);
}

TEST_CASE("prox_state_gd: accurate prox satisfies the movement bound") {
    std::mt19937_64 rng(25);
    const ManifoldModel ms[] = {ManifoldModel::sinusoid(1.0),
                                ManifoldModel::gaussian(2.0, Vector::Zero(2))};
    const SpeedModel speeds[] = {SpeedModel::constant(1.0), SpeedModel::quad_left()};
    const IndicatorParams far{kFarGoal, 50.0}; // bound ignores the indicator
    std::uniform_real_distribution<double> taudt(1e-3, 5e-3);

    for (int i = 0; i < 40; ++i) {
        const auto& m = ms[i % 2];
        const auto& v = speeds[(i / 2) % 2];
        const Vector nu = random_vec(rng, 2, 1.2);
        Vector p = random_vec(rng, 2, 1.5);
        if (p.norm() < 0.3) p = vec2(0.8, -0.4);
        const double tau_dt = taudt(rng);

        const Vector x = prox_state_gd(nu, nu, p, 0.0, tau_dt, 1e-3, 200, m, v, far);
        const double rhs = prox_error_bound(m, v, x, p, 0.0, tau_dt);
        REQUIRE((x - nu).norm() <= 1.05 * rhs + 1e-12);
    }
}

TEST_CASE("prox_state_gd: runaway descent rate raises DivergenceError") {
    const ManifoldModel flat = ManifoldModel::flat(2);
    const SpeedModel unit = SpeedModel::constant(1.0);
    const IndicatorParams ip{vec2(0, 0), 50.0};
    const Vector nu = vec2(1.0, 0.0);
    const Vector start = vec2(5.0, 0.0);
    REQUIRE_THROWS_AS(
        prox_state_gd(nu, start, vec2(1.0, 0.0), 0.0, 0.1, 1e200, 50, flat, unit, ip),
        DivergenceError);
}
