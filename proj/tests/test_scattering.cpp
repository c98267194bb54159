#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nbscatter/scattering.hpp"
#include "test_util.hpp"

using namespace nbs;
using namespace nbs::testing;

namespace {

PhaseState planar_pair(double x1, double y1, double x2, double y2, double p1x, double p1y, double p2x, double p2y) {
    Vec q(4), p(4);
    q << x1, y1, x2, y2;
    p << p1x, p1y, p2x, p2y;
    return {p, q};
}

std::vector<double> dyadic(double first, int count) {
    std::vector<double> t;
    for (int k = 0; k < count; ++k) t.push_back(first * std::ldexp(1.0, k));
    return t;
}

}  // namespace

TEST_CASE("extrapolation recovers exact limits of finite tail expansions") {
    const auto T = dyadic(8, 12);
    std::vector<Vec> y, dy;
    for (double t : T) {
        Vec v(2), d(2);
        v << 1 + 2 / t + 3 / (t * t), -4 + 1 / std::pow(t, 1.5);
        d << -2 / (t * t) - 6 / (t * t * t), -1.5 / std::pow(t, 2.5);
        y.push_back(v);
        dy.push_back(d);
    }
    const LimitEstimate a = extrapolate(T, y, power_ladder(0.5, 0.0, 6), 1e-9);
    CHECK(a.converged);
    CHECK(a.value(0) == doctest::Approx(1).epsilon(1e-10));
    CHECK(a.value(1) == doctest::Approx(-4).epsilon(1e-10));
    const LimitEstimate b = extrapolate(T, y, dy, power_ladder(0.5, 0.0, 6), 1e-9);
    CHECK(b.converged);
    CHECK(std::abs(b.value(0) - 1) < 1e-10);
    CHECK(std::abs(b.value(1) + 4) < 1e-10);
}

TEST_CASE("log ladder handles Coulomb-type tails") {
    const auto T = dyadic(16, 12);
    std::vector<Vec> y, dy;
    for (double t : T) {
        Vec v(1), d(1);
        v << 7 + 0.5 * std::log(t) / t - 2 / t;
        d << 0.5 * (1 - std::log(t)) / (t * t) + 2 / (t * t);
        y.push_back(v);
        dy.push_back(d);
    }
    const LimitEstimate e = extrapolate(T, y, dy, log_ladder(5), 1e-9);
    CHECK(e.converged);
    CHECK(std::abs(e.value(0) - 7) < 1e-10);
    // the plain power ladder cannot represent log T / T
    const LimitEstimate p = extrapolate(T, y, power_ladder(1, 0, 5), 1e-12);
    CHECK(std::abs(p.value(0) - 7) > std::abs(e.value(0) - 7));
}

TEST_CASE("power ladder exponents") {
    const LimitBasis b = power_ladder(0.75, 0.0, 4);  // 0.75, 1.5, 1.75, 2.25
    REQUIRE(b.terms.size() == 4);
    CHECK(b.terms[0](2.0) == doctest::Approx(std::pow(2.0, -0.75)));
    CHECK(b.terms[1](2.0) == doctest::Approx(std::pow(2.0, -1.5)));
    CHECK(b.terms[2](2.0) == doctest::Approx(std::pow(2.0, -1.75)));
    CHECK(b.derivs[0](2.0) == doctest::Approx(-0.75 * std::pow(2.0, -1.75)));
    // odd under T -> -T in the sense |T|^-e with the sign carried by the derivative
    CHECK(b.derivs[0](-2.0) == doctest::Approx(0.75 * std::pow(2.0, -1.75)));
}

TEST_CASE("fit_loglog recovers an exact power law") {
    std::vector<double> t, y;
    for (int k = 0; k < 10; ++k) {
        t.push_back(std::pow(10.0, 1 + 0.3 * k));
        y.push_back(3.0 * std::pow(t.back(), -1.25));
    }
    const LineFit f = fit_loglog(t, y);
    CHECK(f.slope == doctest::Approx(-1.25).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.halfwidth < 1e-10);
}

TEST_CASE("zero potential: transforms are the identity") {
    const SystemSpec s = pair_spec(2, 2.0, 0.0);
    const PhaseState x = planar_pair(0, 0, 3, 1, -0.5, 0.2, 0.5, -0.2);
    const ScatteringDatum v = asymptotic_velocity(s, x, 1);
    CHECK(v.converged);
    CHECK(max_abs(v.p - x.p) < 1e-14);
    const ScatteringDatum w = inverse_moller(s, x, 1, Comparison::free);
    CHECK(max_abs(w.p - x.p) < 1e-12);
    CHECK(max_abs(w.r - x.q) < 1e-9);
    const ScatteringDatum m = moller_time_limit(s, x, -1, Comparison::free);
    CHECK(max_abs(m.r - x.q) < 1e-9);
}

TEST_CASE("short-range pair: time limit and inverse transform undo each other") {
    const SystemSpec s = pair_spec(2, 2.0, 1.0);
    const PhaseState X = planar_pair(0, 0, 40, 3, -1.0, -0.05, 1.0, 0.05);
    const ScatteringDatum fwd = moller_time_limit(s, X, 1, Comparison::free);
    const ScatteringDatum back = inverse_moller(s, fwd.state(), 1, Comparison::free);
    CHECK(max_abs(back.p - X.p) < 1e-8);
    CHECK(max_abs(back.r - X.q) < 1e-6);
    // the transform preserves energy: H(Omega X) = |P|^2 / 2M
    CHECK(hamiltonian(s, fwd.state()) == doctest::Approx(kinetic_energy(s, X.p)).epsilon(1e-9));
}

TEST_CASE("property: free and Dollard flows are symplectic maps") {
    for (int trial = 0; trial < 10; ++trial) {
        CounterRng rng(41, trial);
        const SystemSpec s = random_spec(rng, 2, 2, 0);
        const PhaseState x(momentum(s, random_positions(rng, s, 4, 1.0)), random_positions(rng, s));
        const double t = rng.uniform(-5, 5);
        CAPTURE(trial);
        CHECK(symplectic_residual([&](const PhaseState& y) { return free_flow(s, y, t); }, x, 1e-5).residual < 1e-10);
        CHECK(symplectic_residual([&](const PhaseState& y) { return dollard_flow(s, t, 0, y); }, x, 1e-5).residual <
              1e-7);
    }
}

TEST_CASE("a non-symplectic map is detected") {
    const SystemSpec s = pair_spec(1, 1, 0);
    Vec p(2), q(2);
    p << 1, 2;
    q << 3, 4;
    auto squeeze = [](const PhaseState& y) { return PhaseState(y.p, 2 * y.q); };
    CHECK(symplectic_residual(squeeze, PhaseState(p, q), 1e-5).residual > 0.5);
}

TEST_CASE("deflection angle and projections") {
    const SystemSpec s = pair_spec(2, 1, -1);
    Vec a(4), b(4), c(4);
    a << 1, 0, -1, 0;
    b << 0, 1, 0, -1;
    c << -1, 0, 1, 0;
    CHECK(deflection_angle(s, a, a) == doctest::Approx(0));
    CHECK(deflection_angle(s, a, b) == doctest::Approx(std::numbers::pi / 2));
    CHECK(deflection_angle(s, a, c) == doctest::Approx(std::numbers::pi));

    for (int trial = 0; trial < 20; ++trial) {
        CounterRng rng(42, trial);
        const Vec v = random_vector(rng, 5), w = random_vector(rng, 5);
        const Vec u = project_perp(w, v);
        CHECK(std::abs(u.dot(v)) < 1e-12 * w.norm() * v.norm());
        CHECK(max_abs(project_perp(u, v) - u) < 1e-14);
    }
}

TEST_CASE("domain errors") {
    const SystemSpec coulomb = pair_spec(2, 1.0, 1.0);
    const PhaseState x = planar_pair(0, 0, 10, 1, -1, 0, 1, 0);
    CHECK_THROWS_AS(inverse_moller(coulomb, x, 1, Comparison::free), DomainError);
    CHECK_THROWS_AS(inverse_moller_dollard(pair_spec(2, 0.4, 1.0), x, 1), DomainError);
    CHECK_THROWS_AS(asymptotic_velocity(coulomb, x, 2), ValidationError);
    CHECK(default_comparison(coulomb) == Comparison::dollard);
    CHECK(default_comparison(pair_spec(2, 1.5, 1.0)) == Comparison::free);
}

TEST_CASE("a bound orbit has no asymptotic datum") {
    const SystemSpec s = make_spec(2, 2, {1, 1}, PotentialModel::newtonian({1, 1}));
    const double v = std::sqrt(2.0) / 2;  // circular orbit of radius 1
    const PhaseState x = planar_pair(0.5, 0, -0.5, 0, 0, v, 0, -v);
    TransformConfig cfg;
    cfg.T_max = 1000;
    const ScatteringDatum d = asymptotic_velocity(s, x, 1, cfg);
    CHECK_FALSE(d.dispersing);
    CHECK_FALSE(d.converged);
    CHECK_THROWS_AS(inverse_moller(s, x, 1, Comparison::dollard, cfg), NotFreeError);
}
