#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace nbs;
using namespace nbs::testing;

namespace {

// Closed form for one homogeneous pair I |q|^-alpha:
//   k = 1: each first partial has sup |q|^(alpha+1) |d_a| = alpha
//   k = 2: diagonal partials reach alpha (alpha + 1), mixed ones alpha (alpha + 2) / 2
double homogeneous_seminorm(int d, double alpha, double I, double m_min, int k) {
    const double scale = std::abs(I) / m_min;
    if (k == 1) return scale * d * alpha;
    return scale * (d * alpha * (alpha + 1) + d * (d - 1) / 2.0 * alpha * (alpha + 2) / 2);
}

Vec fd_gradient(const SystemSpec& s, const Vec& q, double h) {
    Vec g(q.size());
    for (Eigen::Index k = 0; k < q.size(); ++k) {
        Vec a = q, b = q;
        a(k) += h;
        b(k) -= h;
        g(k) = (potential_energy(s, a) - potential_energy(s, b)) / (2 * h);
    }
    return g;
}

}  // namespace

TEST_CASE("seminorm of a homogeneous pair matches the closed form") {
    for (int d : {1, 2, 3})
        for (double alpha : {0.5, 1.0, 2.0}) {
            const SystemSpec s = pair_spec(d, alpha, -1.5, 0.5, 2.0);
            CAPTURE(d);
            CAPTURE(alpha);
            CHECK(seminorm(s, 1).value == doctest::Approx(homogeneous_seminorm(d, alpha, -1.5, 0.5, 1)).epsilon(1e-12));
            CHECK(seminorm(s, 2).value == doctest::Approx(homogeneous_seminorm(d, alpha, -1.5, 0.5, 2)).epsilon(1e-12));
        }
}

TEST_CASE("Newtonian pair: coordinate seminorm 3, gradient seminorm 1") {
    const SystemSpec s = make_spec(2, 3, {1, 1}, PotentialModel::newtonian({1, 1}));
    CHECK(seminorm(s, 1).value == doctest::Approx(3.0));
    CHECK(gradient_seminorm(s) == doctest::Approx(1.0));
}

TEST_CASE("multi_indices enumerates C(d+k-1, k) indices of order k") {
    CHECK(multi_indices(3, 1).size() == 3);
    CHECK(multi_indices(3, 2).size() == 6);
    CHECK(multi_indices(2, 3).size() == 4);
    for (const auto& g : multi_indices(4, 3)) {
        int sum = 0;
        for (int x : g) sum += x;
        CHECK(sum == 3);
    }
}

TEST_CASE("homogeneous_partial agrees with finite differences") {
    Vec x(3);
    x << 0.7, -1.1, 0.4;
    const double alpha = 1.3, h = 1e-5;
    auto f = [&](const Vec& y) { return std::pow(y.norm(), -alpha); };
    for (int a = 0; a < 3; ++a) {
        Vec xp = x, xm = x;
        xp(a) += h;
        xm(a) -= h;
        std::vector<int> g(3, 0);
        g[a] = 1;
        CHECK(homogeneous_partial(alpha, g, x) == doctest::Approx((f(xp) - f(xm)) / (2 * h)).epsilon(1e-8));
    }
}

TEST_CASE("property: gradient and Hessian agree with finite differences") {
    for (int trial = 0; trial < 40; ++trial) {
        CounterRng rng(11, trial);
        const SystemSpec s = random_spec(rng, 3, 2, trial);
        const Vec q = random_positions(rng, s);
        const Vec g = grad_potential(s, q);
        const Vec gfd = fd_gradient(s, q, 1e-5);
        CAPTURE(trial);
        CHECK(max_abs(g - gfd) <= 1e-6 * (1 + max_abs(g)));

        const Vec w = random_vector(rng, s.dim());
        const double h = 1e-5;
        const Vec Hw_fd = (grad_potential(s, q + h * w) - grad_potential(s, q - h * w)) / (2 * h);
        const Vec Hw = hess_potential_apply(s, q, w);
        CHECK(max_abs(Hw - Hw_fd) <= 1e-5 * (1 + max_abs(Hw)));
    }
}

TEST_CASE("property: translation invariance and zero total force") {
    for (int trial = 0; trial < 40; ++trial) {
        CounterRng rng(12, trial);
        const SystemSpec s = random_spec(rng, 4, 3, trial);
        const Vec q = random_positions(rng, s);
        Vec shift(s.dim());
        const Vec a = random_vector(rng, s.d, 10);
        for (int i = 0; i < s.n; ++i) shift.segment(i * s.d, s.d) = a;
        CAPTURE(trial);
        CHECK(potential_energy(s, q + shift) == doctest::Approx(potential_energy(s, q)).epsilon(1e-10));
        const Vec F = total_momentum(s, grad_potential(s, q));
        CHECK(max_abs(F) <= 1e-12 * (1 + max_abs(grad_potential(s, q))));
    }
}

TEST_CASE("property: homogeneous potentials scale like lambda^-alpha") {
    for (int trial = 0; trial < 30; ++trial) {
        CounterRng rng(13, trial);
        const SystemSpec s = random_spec(rng, 3, 2, 0);
        const Vec q = random_positions(rng, s);
        const double lambda = rng.uniform(0.2, 5.0), alpha = s.potential.alpha;
        CAPTURE(trial);
        CHECK(potential_energy(s, lambda * q) ==
              doctest::Approx(std::pow(lambda, -alpha) * potential_energy(s, q)).epsilon(1e-11));
        CHECK(max_abs(grad_potential(s, lambda * q) - std::pow(lambda, -alpha - 1) * grad_potential(s, q)) <=
              1e-11 * (1 + max_abs(grad_potential(s, q))));
    }
}

TEST_CASE("property: the seminorm is homogeneous of degree one in the coupling") {
    for (int trial = 0; trial < 10; ++trial) {
        CounterRng rng(14, trial);
        const SystemSpec s = random_spec(rng, 3, 2, 0);
        SystemSpec t = s;
        const double c = rng.uniform(0.1, 10);
        t.potential.coupling *= c;
        CHECK(seminorm(t, 1).value == doctest::Approx(c * seminorm(s, 1).value).epsilon(1e-12));
        CHECK(seminorm(t, 2).value == doctest::Approx(c * seminorm(s, 2).value).epsilon(1e-12));
    }
}

TEST_CASE("energy bookkeeping") {
    const SystemSpec s = make_spec(2, 1, {1, 3}, PotentialModel::uniform(2, 1, 2.0));
    Vec p(2), q(2);
    p << 2, -3;
    q << 0, 4;
    CHECK(kinetic_energy(s, p) == doctest::Approx(2.0 + 1.5));
    CHECK(potential_energy(s, q) == doctest::Approx(0.5));
    CHECK(hamiltonian(s, PhaseState(p, q)) == doctest::Approx(4.0));
    CHECK(max_abs(momentum(s, velocity(s, p)) - p) == 0.0);
}

TEST_CASE("pair statistics") {
    const SystemSpec s = make_spec(3, 1, {1, 1, 1}, PotentialModel::uniform(3, 1, 0));
    Vec p(3), q(3);
    p << -1, 0, 2;
    q << -1, 0, 3;
    const PairStats st = pair_stats(s, PhaseState(p, q));
    CHECK(st.q_min == doctest::Approx(1));
    CHECK(st.q_max == doctest::Approx(4));
    CHECK(st.v_min == doctest::Approx(1));
    CHECK(st.v_max == doctest::Approx(3));
    REQUIRE(st.radial.size() == 3);
    CHECK(st.radial[0] == doctest::Approx(1));  // (v0 - v1)(q0 - q1) = (-1)(-1)
}

TEST_CASE("packing round-trips") {
    CounterRng rng(15, 0);
    const PhaseState x(random_vector(rng, 6), random_vector(rng, 6));
    const PhaseState y = PhaseState::unpack(x.packed());
    CHECK(y.p == x.p);
    CHECK(y.q == x.q);
    CHECK(x.packed().head(6) == x.q);
}

TEST_CASE("validation rejects malformed systems") {
    SystemSpec s = pair_spec(2, 1, 1);
    CHECK_NOTHROW(s.validate());
    s.masses = {1, -1};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = pair_spec(2, 1, 1);
    s.masses = {1};
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = pair_spec(2, 1, 1);
    s.potential.coupling = Mat::Zero(3, 3);
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = pair_spec(2, 1, 1);
    s.potential.alpha = -1;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = make_spec(2, 2, {1, 1}, PotentialModel::soft_power(1, Mat::Ones(2, 2), 0.5));
    s.potential.softening = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("smooth families report their decay order and cannot go past second derivatives") {
    const SystemSpec s = make_spec(2, 2, {1, 1}, PotentialModel::soft_power(1.5, Mat::Ones(2, 2), 0.3));
    CHECK(s.potential.smooth());
    CHECK(s.potential.max_order() == 2);
    CHECK_THROWS_AS(seminorm(s, 3), SeminormError);
}
