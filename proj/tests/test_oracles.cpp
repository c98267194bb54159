#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nbscatter/oracles.hpp"
#include "nbscatter/scattering.hpp"
#include "test_util.hpp"

using namespace nbs;
using namespace nbs::testing;

TEST_CASE("Kepler hyperbola elements") {
    const KeplerHyperbola h = kepler_hyperbola(1, 2, 2, 1.5, 3);
    CHECK(h.mu == doctest::Approx(2.0 / 3));
    CHECK(h.kappa == doctest::Approx(3));
    // e^2 = 1 + 2 E L^2 / kappa^2 with E = v^2 / 2 and L = b v per unit reduced mass
    const double E = 0.5 * 1.5 * 1.5, L = 3 * 1.5;
    CHECK(h.e == doctest::Approx(std::sqrt(1 + 2 * E * L * L / 9)));
    CHECK(h.deflection() == doctest::Approx(2 * std::asin(1 / h.e)));
    // head-on limit: e -> 1 reverses the relative velocity
    CHECK(kepler_hyperbola(1, 1, 1, 1, 0).deflection() == doctest::Approx(std::numbers::pi));
    CHECK_THROWS_AS(kepler_hyperbola(1, 1, -1, 1, 1), ValidationError);
}

TEST_CASE("property: hyperbolic anomaly solves Kepler's equation") {
    for (int trial = 0; trial < 100; ++trial) {
        CounterRng rng(51, trial);
        const double e = 1 + rng.uniform(1e-3, 20), M = rng.uniform(-1e4, 1e4);
        const double H = hyperbolic_anomaly(e, M);
        CHECK(std::abs(e * std::sinh(H) - H - M) <= 1e-12 * std::max(1.0, std::abs(M)));
    }
    CHECK(hyperbolic_anomaly(2, 0) == 0);
    CHECK_THROWS_AS(hyperbolic_anomaly(0.5, 1), DomainError);
}

TEST_CASE("Kepler conic agrees with the integrator") {
    const KeplerHyperbola h = kepler_hyperbola(1, 2, 2, 0.8, 1.5);
    const SystemSpec s = make_spec(2, 2, {1, 2}, PotentialModel::newtonian({1, 2}));
    const PhaseState x0 = kepler_two_body_state(h, -10, 0.4);
    const PhaseState x1 = kepler_two_body_state(h, 10, 0.4);
    IntegratorConfig c;
    c.store_steps = false;
    const PhaseState y = flow(s, x0, 20, c);
    CHECK(max_abs(y.q - x1.q) < 1e-8);
    CHECK(max_abs(y.p - x1.p) < 1e-8);
    // conic energy is mu v_inf^2 / 2
    CHECK(hamiltonian(s, x0) == doctest::Approx(0.5 * h.mu * 0.8 * 0.8).epsilon(1e-12));
}

TEST_CASE("asymptotic directions match the orbit far from periapsis") {
    const KeplerHyperbola h = kepler_hyperbola(1, 1, 1, 1, 2);
    const Eigen::Vector2d vin = kepler_relative_state(h, -1e7).v.normalized();
    const Eigen::Vector2d vout = kepler_relative_state(h, 1e7).v.normalized();
    CHECK((vin - kepler_incoming_direction(h)).norm() < 1e-5);
    CHECK((vout - kepler_outgoing_direction(h)).norm() < 1e-5);
    CHECK(std::acos(vin.dot(vout)) == doctest::Approx(h.deflection()).epsilon(1e-5));
}

TEST_CASE("central configurations") {
    const std::vector<double> m = {1, 1, 1};
    const SystemSpec s = make_spec(3, 2, m, PotentialModel::newtonian(m));
    // Lagrange: equilateral triangle centred at the origin
    Vec tri(6);
    for (int i = 0; i < 3; ++i) {
        const double th = 2 * std::numbers::pi * i / 3;
        tri.segment(2 * i, 2) << std::cos(th), std::sin(th);
    }
    CHECK(is_central_configuration(s, tri));
    CHECK(is_central_configuration(s, 3.7 * tri));
    // Euler: equal masses on a line, symmetric about the middle one
    Vec line(6);
    line << -1, 0, 0, 0, 1, 0;
    CHECK(is_central_configuration(s, line));
    // a generic configuration is not central
    Vec off(6);
    off << 0, 0, 1, 0, 0.2, 1.5;
    CHECK(central_configuration_defect(s, off) > 1e-3);

    // Lagrange triangles stay central for unequal masses once centred
    const std::vector<double> mu = {1, 2, 3};
    const SystemSpec u = make_spec(3, 2, mu, PotentialModel::newtonian(mu));
    Vec c = Vec::Zero(2), x = tri;
    for (int i = 0; i < 3; ++i) c += mu[i] * tri.segment(2 * i, 2) / 6;
    for (int i = 0; i < 3; ++i) x.segment(2 * i, 2) -= c;
    CHECK(is_central_configuration(u, x));
}

TEST_CASE("Herbst reduction") {
    const SystemSpec s = herbst_system(0.5, 1.5);
    const PhaseState x = herbst_embed(4.0, 0.7);
    CHECK(herbst_relative(x) == doctest::Approx(4.0));
    // relative energy p^2/2 + I q^-alpha
    CHECK(hamiltonian(s, x) == doctest::Approx(0.5 * 0.49 + 1.5 / 2.0));
    // relative acceleration alpha I q^-(alpha+1)
    const Vec a = velocity(s, -grad_potential(s, x.q));
    CHECK(a(1) - a(0) == doctest::Approx(0.5 * 1.5 * std::pow(4.0, -1.5)));
}

TEST_CASE("property: Herbst profiles differ by the factor alpha in the growing term") {
    for (int trial = 0; trial < 30; ++trial) {
        CounterRng rng(52, trial);
        const double alpha = rng.uniform(0.1, 0.9), I = rng.uniform(0.1, 3), h = rng.uniform(0.1, 2);
        const double q0 = rng.uniform(-5, 5), t = rng.uniform(10, 1e4);
        const HerbstProfiles pr = herbst_profiles(alpha, I, h, q0, t);
        const double pt = std::sqrt(2 * h) * t;
        CHECK((pr.q1 - q0 - pt) / (pr.z1 - pt) == doctest::Approx(alpha).epsilon(1e-10));
    }
    CHECK_THROWS_AS(herbst_profiles(1.0, 1, 1, 0, 1), DomainError);
    CHECK_THROWS_AS(herbst_profiles(0.5, 1, -1, 0, 1), DomainError);
}

TEST_CASE("fit_asymptote on exact straight lines and on a logarithmic drift") {
    const SystemSpec s = make_spec(3, 2, {1, 2, 1}, PotentialModel::uniform(3, 1, 0));
    Vec v(6), q0(6), w(6);
    v << 1, 0, 0, 0.5, -1, -0.5;
    q0 << 0, 3, 1, -2, 4, 0;
    const Vec p = momentum(s, v);
    std::vector<double> ts;
    std::vector<PhaseState> line, drift;
    w = project_perp(Vec(q0.reverse()), v).normalized();
    for (int k = 0; k < 12; ++k) {
        const double t = 100 * std::ldexp(1.0, k);
        ts.push_back(t);
        line.emplace_back(p, q0 + v * t);
        drift.emplace_back(p, q0 + v * t + 0.3 * std::log(t) * w);
    }
    const AsymptoteFit a = fit_asymptote(s, ts, line);
    CHECK(a.converges);
    CHECK(max_abs(a.velocity - v) < 1e-12);
    CHECK(max_abs(a.offset - project_perp(q0, v)) < 1e-9);
    CHECK(a.log_coefficient < 1e-9);

    const AsymptoteFit b = fit_asymptote(s, ts, drift);
    CHECK_FALSE(b.converges);
    CHECK(b.log_coefficient == doctest::Approx(0.3).epsilon(1e-8));

    CHECK_THROWS_AS(fit_asymptote(s, {1, 2}, {line[0], line[1]}), ValidationError);
}
