#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "nbscatter/scattering.hpp"

namespace nbs {

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
struct Rule {
    std::vector<double> x, w;
    Rule() {
        using G = boost::math::quadrature::gauss<double, 8>;
        const auto& a = G::abscissa();
        const auto& wt = G::weights();
        for (std::size_t i = 0; i < a.size(); ++i) {
            x.push_back(a[i]);
            w.push_back(wt[i]);
            x.push_back(-a[i]);
            w.push_back(wt[i]);
        }
    }
};

const Rule& rule() {
    static const Rule r;
    return r;
}

// Cubic Hermite interpolation of r on [a, b].
Vec hermite(double a, double b, const Vec& ra, const Vec& rb, const Vec& da, const Vec& db, double t) {
    const double h = b - a, s = (t - a) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * ra + (s3 - 2 * s2 + s) * h * da + (-2 * s3 + 3 * s2) * rb + (s3 - s2) * h * db;
}

}  // namespace

FixedPointResult moller_fixed_point(const SystemSpec& spec, const PhaseState& X0, const FixedPointConfig& cfg) {
    spec.validate();
    const double alpha = spec.potential.alpha;
    if (!(alpha > 1)) throw DomainError("moller_fixed_point: needs a short-range potential (alpha > 1)");
    if (cfg.require_free_region && !membership(spec, X0, FreeRegionParams::defaults(spec, true)).inside)
        throw NotFreeError("moller_fixed_point: X0 is not in the finally-free region");

    const Vec V0 = velocity(spec, X0.p);
    const PairStats ps = pair_stats(spec, X0);
    const double tau0 = ps.q_min / ps.v_max;
    const double r_limit = 0.5 * ps.q_min;

    FixedPointResult res;
    auto& grid = res.grid;
    for (double t = 0; t < cfg.T_max;) {
        grid.push_back(t);
        t += cfg.growth * (t + tau0);
    }
    grid.push_back(cfg.T_max);
    const std::size_t N = grid.size();
    const Eigen::Index m = X0.q.size();
    std::vector<Vec> r(N, Vec::Zero(m)), rd(N, Vec::Zero(m));
    const Rule& gl = rule();

    auto free_line = [&](double t) -> Vec { return X0.q + t * V0; };

    // Tail beyond T_max, r continued as r(T) (T/tau)^(alpha-1); tau = T/u.
    auto tail = [&](const Vec& rT, Vec& A, Vec& B) {
        const double T = cfg.T_max;
        A = Vec::Zero(m);
        B = Vec::Zero(m);
        for (int k = 0; k < 60; ++k) {
            const double lo = std::ldexp(1.0, -k - 1), hi = std::ldexp(1.0, -k);
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                const double u = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[i];
                const double w = 0.5 * (hi - lo) * gl.w[i];
                const double tau = T / u;
                const Vec g = grad_potential(spec, free_line(tau) + rT * std::pow(u, alpha - 1));
                A += w * (T / (u * u)) * g;
                B += w * (T * T / (u * u * u)) * g;
            }
        }
    };

    Vec A_tail, B_tail;
    double prev_change = 0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        // per-interval integrals of g and tau g
        std::vector<Vec> Ai(N - 1), Bi(N - 1);
        for (std::size_t k = 0; k + 1 < N; ++k) {
            const double a = grid[k], b = grid[k + 1];
            Vec A = Vec::Zero(m), B = Vec::Zero(m);
            for (std::size_t i = 0; i < gl.x.size(); ++i) {
                const double tau = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
                const double w = 0.5 * (b - a) * gl.w[i];
                const Vec g = grad_potential(spec, free_line(tau) + hermite(a, b, r[k], r[k + 1], rd[k], rd[k + 1], tau));
                A += w * g;
                B += w * tau * g;
            }
            Ai[k] = std::move(A);
            Bi[k] = std::move(B);
        }
        tail(r[N - 1], A_tail, B_tail);

        std::vector<Vec> r_new(N), rd_new(N);
        Vec SA = A_tail, SB = B_tail;
        double change = 0, sup = 0;
        for (std::size_t k = N; k-- > 0;) {
            if (k + 1 < N) {
                SA += Ai[k];
                SB += Bi[k];
            }
            r_new[k] = -velocity(spec, SB - grid[k] * SA);
            rd_new[k] = velocity(spec, SA);
            change = std::max({change, (r_new[k] - r[k]).cwiseAbs().maxCoeff(),
                               (rd_new[k] - rd[k]).cwiseAbs().maxCoeff()});
            sup = std::max(sup, r_new[k].norm());
        }
        r = std::move(r_new);
        rd = std::move(rd_new);
        res.iterations = it + 1;
        res.sup_change.push_back(change);
        res.r_sup = sup;
        if (it > 0 && prev_change > 0 && change > 1e-13) res.max_ratio = std::max(res.max_ratio, change / prev_change);
        prev_change = change;
        if (sup > r_limit)
            throw NotFreeError("moller_fixed_point: iterate left the ball |r| <= q_min/2");
        if (change < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    res.tail_contribution = velocity(spec, B_tail - cfg.T_max * A_tail).norm();
    res.x = PhaseState(X0.p + momentum(spec, rd[0]), X0.q + r[0]);
    res.r = std::move(r);
    res.rdot = std::move(rd);
    return res;
}

}  // namespace nbs
