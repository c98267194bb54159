#include "nbscatter/acceptance.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "nbscatter/free_region.hpp"
#include "nbscatter/limits.hpp"
#include "nbscatter/oracles.hpp"
#include "nbscatter/rng.hpp"
#include "nbscatter/scattering.hpp"
#include "parallel.hpp"

namespace nbs {

namespace {

Measurement below(std::string name, double value, double hi, bool strict = true) {
    Measurement m{std::move(name), value, strict ? "<" : "<=", 0, hi};
    m.pass = strict ? value < hi : value <= hi;
    return m;
}

Measurement above(std::string name, double value, double lo, bool strict = true) {
    Measurement m{std::move(name), value, strict ? ">" : ">=", lo, 0};
    m.pass = strict ? value > lo : value >= lo;
    return m;
}

Measurement within(std::string name, double value, double lo, double hi, double halfwidth = 0) {
    Measurement m{std::move(name), value, "in", lo, hi, halfwidth};
    m.pass = value >= lo && value <= hi;
    return m;
}

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double state_distance(const PhaseState& a, const PhaseState& b) {
    return std::max(max_abs(a.p - b.p), max_abs(a.q - b.q));
}

SystemSpec two_body(int d, double alpha, double I, double m1 = 1, double m2 = 1) {
    SystemSpec s;
    s.n = 2;
    s.d = d;
    s.masses = {m1, m2};
    s.potential = PotentialModel::uniform(2, alpha, I);
    // unequal masses: coupling I is per pair, independent of the masses
    return s;
}

SystemSpec newtonian(int n, int d, const std::vector<double>& masses) {
    SystemSpec s;
    s.n = n;
    s.d = d;
    s.masses = masses;
    s.potential = PotentialModel::newtonian(masses);
    return s;
}

PhaseState planar_pair(double x1, double y1, double x2, double y2, double p1x, double p1y, double p2x, double p2y) {
    Vec q(4), p(4);
    q << x1, y1, x2, y2;
    p << p1x, p1y, p2x, p2y;
    return {p, q};
}

IntegratorConfig tight() {
    IntegratorConfig c;
    c.rel_tol = 1e-13;
    c.abs_tol = 1e-15;
    c.store_steps = false;
    return c;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> t;
    for (int k = 0; k < n; ++k) t.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
    return t;
}

// 1. Forward invariance of the finally-free region and the propagation sandwich.
CriterionResult c1(const AcceptanceOptions& opt) {
    CriterionResult r;
    constexpr int N = 100;
    std::vector<int> inside(N, 0), sandwich(N, 0);
    std::vector<double> worst_margin(N, 0), worst_lower(N, 0), worst_upper(N, 0);
    parallel_for(N, opt.threads, [&](std::size_t i) {
        CounterRng rng(opt.seed, 1000 + i);
        std::vector<double> m = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        const SystemSpec spec = newtonian(3, 2, m);
        const FreeRegionParams prm = FreeRegionParams::defaults(spec);
        const PhaseState x0 = sample_free_state(spec, prm, rng);
        IntegratorConfig ic;
        ic.rel_tol = 1e-10;
        ic.abs_tol = 1e-12;
        ic.store_steps = false;
        std::vector<double> ts;
        for (int k = 1; k <= 100; ++k) ts.push_back(k);
        const Trajectory tr = integrate(spec, x0, 0.0, 100.0, ic, ts);
        bool all = tr.completed() && membership(spec, x0, prm).inside;
        double wm = membership(spec, x0, prm).min_margin();
        for (const auto& x : tr.checkpoint_x) {
            const Membership mb = membership(spec, x, prm);
            all = all && mb.inside;
            wm = std::min(wm, mb.min_margin());
        }
        const PropagationReport pr = propagation_check(spec, x0, tr.checkpoint_t, tr.checkpoint_x, 1e-6);
        inside[i] = all;
        sandwich[i] = pr.ok && tr.completed();
        worst_margin[i] = wm;
        worst_lower[i] = pr.worst_lower;
        worst_upper[i] = pr.worst_upper;
    });
    int n_in = 0, n_sw = 0;
    for (int i = 0; i < N; ++i) {
        n_in += inside[i];
        n_sw += sandwich[i];
    }
    r.measurements.push_back(above("fraction retaining membership", n_in / double(N), 1.0, false));
    r.measurements.push_back(above("fraction satisfying sandwich", n_sw / double(N), 1.0, false));
    r.measurements.push_back(above("min normalised margin", *std::min_element(worst_margin.begin(), worst_margin.end()), 0.0));
    r.note = fmt::format("worst sandwich slack: lower {:.3e}, upper {:.3e}",
                         *std::min_element(worst_lower.begin(), worst_lower.end()),
                         *std::min_element(worst_upper.begin(), worst_upper.end()));
    return r;
}

// 2. |p(t) - p+| ~ t^-alpha and the a-priori tail bound after entry.
CriterionResult c2(const AcceptanceOptions&) {
    CriterionResult r;
    for (double alpha : {0.6, 1.0}) {
        const SystemSpec spec = two_body(2, alpha, -1.0);
        const PhaseState x0 = planar_pair(0, 0, 3, 0.5, 1.0, -0.5, -1.0, 0.5);
        TransformConfig cfg;
        cfg.T_first = 100.0 / 64;
        cfg.T_max = 1e6;
        const ScatteringDatum av = asymptotic_velocity(spec, x0, 1, cfg);

        const std::vector<double> fit_t = log_grid(1e2, 1e4, 25);
        std::vector<double> ts = fit_t;
        ts.insert(ts.end(), av.T.begin(), av.T.end());
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        const Trajectory tr = integrate(spec, x0, 0.0, ts.back(), tight(), ts);

        const FreeRegionParams prm = FreeRegionParams::defaults(spec);
        const double s1 = seminorm(spec, 1).value;
        std::vector<double> ft, fd;
        bool entered = false;
        double worst = 0, entry = 0;
        for (std::size_t k = 0; k < tr.checkpoint_t.size(); ++k) {
            const double t = tr.checkpoint_t[k];
            const PhaseState& x = tr.checkpoint_x[k];
            const double dp = (x.p - av.p).norm();
            if (t >= 1e2 * (1 - 1e-12) && t <= 1e4 * (1 + 1e-12) &&
                std::find(fit_t.begin(), fit_t.end(), t) != fit_t.end()) {
                ft.push_back(t);
                fd.push_back(dp);
            }
            if (!entered && membership(spec, x, prm).inside) {
                entered = true;
                entry = t;
            }
            if (entered) {
                const PairStats ps = pair_stats(spec, x);
                const double bound = 2 * s1 / (alpha * ps.v_min * std::pow(ps.q_min, alpha));
                worst = std::max(worst, dp / bound);
            }
        }
        const LineFit fit = fit_loglog(ft, fd);
        r.measurements.push_back(
            within(fmt::format("alpha={} slope of |p-p+|", alpha), fit.slope, -alpha - 0.15, -alpha + 0.15, fit.halfwidth));
        r.measurements.push_back(above(fmt::format("alpha={} entered F+loc by horizon", alpha), entered ? 1 : 0, 0.5));
        r.measurements.push_back(below(fmt::format("alpha={} max |p-p+| / bound after entry", alpha), worst, 1.0, false));
        r.note += fmt::format("alpha={}: entry checkpoint t={:.4g}, p+ residual {:.2e}; ", alpha, entry, av.residual);
    }
    return r;
}

// 3. Herbst: q - z1 converges, q - q1 grows like t^(1-alpha).
CriterionResult c3(const AcceptanceOptions&) {
    CriterionResult r;
    const double alpha = 0.75, I = 1.0, h = 0.5, q_start = 10.0;
    const SystemSpec spec = herbst_system(alpha, I);
    const double p_start = std::sqrt(2 * (h - I * std::pow(q_start, -alpha)));
    const PhaseState x0 = herbst_embed(q_start, p_start);
    const double pp = std::sqrt(2 * h);
    auto Ts = dyadic_times(1e5 / 1024, 1e5);
    const Trajectory tr = integrate(spec, x0, 0.0, Ts.back(), tight(), Ts);
    std::vector<Vec> y(Ts.size(), Vec(1)), dy(Ts.size(), Vec(1));
    std::vector<double> D;
    for (std::size_t k = 0; k < Ts.size(); ++k) {
        const double t = Ts[k];
        const PhaseState& x = tr.checkpoint_x[k];
        const HerbstProfiles prof = herbst_profiles(alpha, I, h, 0.0, t);
        const double q = herbst_relative(x), v = x.p(1);  // relative velocity = p (reduced mass 1)
        y[k](0) = q - prof.z1;
        dy[k](0) = v - (pp - I * std::pow(pp, -1 - alpha) * std::pow(t, -alpha));
        D.push_back(q - prof.q1);
    }
    const LimitEstimate est = extrapolate(Ts, y, dy, power_ladder(alpha, 1.0, 5), 1e-4, 4);
    r.measurements.push_back(below("Cauchy residual of extrapolated q - z1", est.cauchy, 1e-4));
    std::vector<double> it, inc;
    for (std::size_t k = 0; k + 1 < D.size(); ++k) {
        it.push_back(Ts[k]);
        inc.push_back(std::abs(D[k + 1] - D[k]));
    }
    const LineFit fit = fit_loglog(it, inc);
    r.measurements.push_back(within("growth exponent of q - q1", fit.slope, 1 - alpha - 0.1, 1 - alpha + 0.1, fit.halfwidth));
    r.note = fmt::format("raw |(q - z1)(T) - (q - z1)(T/2)| at T=1e5: {:.3e}; limit of q - z1: {:.8f}",
                         std::abs(y.back()(0) - y[y.size() - 2](0)), est.value(0));
    return r;
}

// 4. Conjugacy of the inverse Dollard-Moller transform with free flow.
CriterionResult c4(const AcceptanceOptions&) {
    CriterionResult r;
    const SystemSpec spec = newtonian(2, 2, {1, 1});
    const PhaseState x0 = planar_pair(0, 0, 3, 0.5, 0.2, -0.6, -0.2, 0.6);
    TransformConfig cfg;
    cfg.T_first = 1e5 / 1024;
    cfg.T_max = 1e5;
    const ScatteringDatum d0 = inverse_moller_dollard(spec, x0, 1, cfg);
    for (double t : {1.0, 5.0, 10.0}) {
        const PhaseState xt = flow(spec, x0, t, tight());
        const ScatteringDatum dt = inverse_moller_dollard(spec, xt, 1, cfg);
        const double res = state_distance(dt.state(), free_flow(spec, d0.state(), t));
        r.measurements.push_back(below(fmt::format("conjugacy residual t={}", t), res, 1e-6));
    }
    r.note = fmt::format("horizon T={:.6g}, Cauchy residual of the base transform {:.2e}", d0.T.back(), d0.residual);
    return r;
}

SystemSpec short_range_pair() { return two_body(2, 2.0, 1.0); }

// Relative separation 40 along a shallow angle, relative speed ~2: inside F+loc (short range).
PhaseState short_range_state() { return planar_pair(0, 0, 40, 3, -1.0, -0.05, 1.0, 0.05); }

// 5. Fixed point vs time limit and intertwining (alpha = 2).
CriterionResult c5(const AcceptanceOptions&) {
    CriterionResult r;
    const SystemSpec spec = short_range_pair();
    const PhaseState X0 = short_range_state();
    const FixedPointResult fp = moller_fixed_point(spec, X0);
    r.measurements.push_back(above("fixed point converged", fp.converged ? 1 : 0, 0.5));
    r.measurements.push_back(below("max contraction ratio", fp.max_ratio, 0.95));
    r.measurements.push_back(below("final sup-norm change", fp.sup_change.back(), 1e-10));
    TransformConfig cfg;
    const ScatteringDatum tl = moller_time_limit(spec, X0, 1, Comparison::free, cfg);
    r.measurements.push_back(below("|fixed point - time limit|", state_distance(fp.x, tl.state()), 1e-8));
    for (double t : {1.0, 10.0}) {
        const FixedPointResult ft = moller_fixed_point(spec, free_flow(spec, X0, t));
        const PhaseState rhs = flow(spec, fp.x, t, tight());
        r.measurements.push_back(below(fmt::format("intertwining residual t={}", t), state_distance(ft.x, rhs), 1e-8));
    }
    r.note = fmt::format("iterations {}, |r|_sup {:.3e} (limit {:.3e}), time-limit Cauchy {:.2e}", fp.iterations,
                         fp.r_sup, 0.5 * pair_stats(spec, X0).q_min, tl.residual);
    return r;
}

// 6. Symplecticity of the inverse Moller transform (short range).
CriterionResult c6(const AcceptanceOptions&) {
    CriterionResult r;
    const SystemSpec spec = short_range_pair();
    const PhaseState x0 = planar_pair(0, 0, 5, 1, -0.75, -0.1, 0.75, 0.1);
    TransformConfig cfg;
    auto map = [&](const PhaseState& x) { return inverse_moller(spec, x, 1, Comparison::free, cfg).state(); };
    const SymplecticReport rep = symplectic_residual(map, x0, 1e-5);
    r.measurements.push_back(below("|J^T S J - S|_max", rep.residual, 1e-4));
    return r;
}

// 7. Asymptotes of the Dollard orbit: alpha = 1 versus alpha = 0.7.
CriterionResult c7(const AcceptanceOptions&) {
    CriterionResult r;
    r.known_unattainable = true;
    for (double alpha : {1.0, 0.7}) {
        const SystemSpec spec = two_body(2, alpha, -1.0);
        const double s = alpha < 1 ? 2.0 : 1.0;  // the slower state is captured at alpha = 0.7
        const PhaseState x0 = planar_pair(0, 0, 3, 0.5, 0.2 * s, -0.6 * s, -0.2 * s, 0.6 * s);
        TransformConfig cfg;
        cfg.T_first = 1e5 / 1024;
        const ScatteringDatum d0 = inverse_moller_dollard(spec, x0, 1, cfg);
        std::vector<double> ts = dyadic_times(1e4 / 1024, 1e4);
        const Trajectory tr = integrate(spec, x0, 0.0, 1e4, tight(), ts);
        std::vector<double> diff;
        Vec last;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const PhaseState X = dollard_flow(spec, ts[k], 0.0, d0.state());
            const PhaseState& x = tr.checkpoint_x[k];
            diff.push_back(std::sqrt((X.p - x.p).squaredNorm() + (X.q - x.q).squaredNorm()));
            last = X.q - x.q;
        }
        bool decreasing = true, nondecreasing = true;
        for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
            if (ts[k] < 1e3) continue;
            decreasing = decreasing && diff[k + 1] < diff[k];
            nondecreasing = nondecreasing && diff[k + 1] >= diff[k];
        }
        const Vec c = velocity(spec, grad_potential(spec, velocity(spec, d0.p)));
        if (alpha == 1.0) {
            r.measurements.push_back(below("alpha=1 difference at t=1e4", diff.back(), 1e-4));
            r.measurements.push_back(above("alpha=1 decreasing over [1e3,1e4]", decreasing ? 1 : 0, 0.5));
            r.note += fmt::format(
                "alpha=1: positional difference tends to |M^-1 grad V(v+)| = {:.4f} (measured {:.4f}, "
                "relative mismatch {:.1e}), since t (v(t) - v+) -> M^-1 grad V(v+); ",
                c.norm(), last.norm(), (last + c).norm() / c.norm());
        } else {
            r.measurements.push_back(above("alpha=0.7 difference at t=1e4", diff.back(), 0.1));
            r.measurements.push_back(above("alpha=0.7 non-decreasing over [1e3,1e4]", nondecreasing ? 1 : 0, 0.5));
        }
    }
    return r;
}

// 8. Scattering angle against the Kepler hyperbola.
CriterionResult c8(const AcceptanceOptions& opt) {
    CriterionResult r;
    const double m1 = 1, m2 = 2, v_inf = 1.0;
    const SystemSpec spec = newtonian(2, 2, {m1, m2});
    constexpr int N = 20;
    std::vector<double> err(N, 0), bs(N);
    parallel_for(N, opt.threads, [&](std::size_t i) {
        const double b = 1.0 + 19.0 * i / (N - 1);
        bs[i] = b;
        const KeplerHyperbola h = kepler_hyperbola(m1, m2, m1 * m2, v_inf, b);
        const double M = m1 + m2;
        // relative velocity along +x, relative offset b along +y, centre of mass at rest
        const PhaseState X_in = planar_pair(0, (m2 / M) * b, 0, -(m1 / M) * b, m1 * (m2 / M) * v_inf, 0,
                                            -m2 * (m1 / M) * v_inf, 0);
        const ScatterResult sr = scattering_map(spec, X_in, TransformConfig{});
        err[i] = std::abs(deflection_angle(spec, X_in.p, sr.outgoing.p) - h.deflection());
    });
    const auto worst = std::max_element(err.begin(), err.end());
    r.measurements.push_back(below("max |deflection - 2 asin(1/e)|", *worst, 1e-4));
    r.note = fmt::format("{} impact parameters in [1, 20]; worst at b={:.3g}", N, bs[worst - err.begin()]);
    return r;
}

// 9. Offsets between orbits with equal asymptotic velocity recover b.
CriterionResult c9(const AcceptanceOptions& opt) {
    CriterionResult r;
    const SystemSpec spec = newtonian(2, 2, {1, 1});
    Vec v(4);
    v << 0.6, 0.2, -0.6, -0.2;
    const Vec P = momentum(spec, v);
    const double t0 = 100;
    TransformConfig cfg;
    cfg.T_max = 1e6;  // the time-limit construction has no derivative data, so it needs a longer horizon
    const PhaseState x1 = moller_time_limit(spec, PhaseState(P, v * t0), 1, Comparison::dollard, cfg).state();
    constexpr int N = 10;
    std::vector<double> err(N), orth(N);
    parallel_for(N, opt.threads, [&](std::size_t i) {
        CounterRng rng(opt.seed, 9000 + i);
        Vec b(4);
        for (int c = 0; c < 4; ++c) b(c) = rng.normal();
        b = project_perp(b, v);
        b *= rng.uniform(0.1, 2.0) / b.norm();
        const PhaseState x2 = moller_time_limit(spec, PhaseState(P, v * t0 + b), 1, Comparison::dollard, cfg).state();
        const OffsetResult off = asymptotic_offset(spec, x2, x1, cfg);
        err[i] = max_abs(off.offset - b);
        orth[i] = off.orthogonality;
    });
    r.measurements.push_back(below("max |offset - b|", *std::max_element(err.begin(), err.end()), 1e-5));
    r.measurements.push_back(below("max |<offset, v+>| / (|offset| |v+|)", *std::max_element(orth.begin(), orth.end()), 1e-12));
    return r;
}

// 10. f_alpha, W, and the smooth-absolute-value sandwich.
CriterionResult c10(const AcceptanceOptions& opt) {
    CriterionResult r;
    double e1 = 0;
    for (int k = 0; k <= 4000; ++k) {
        const double t = -1000 + 0.5 * k;
        e1 = std::max(e1, std::abs(f_alpha_quadrature(1.0, t) - std::asinh(t)));
    }
    r.measurements.push_back(below("max |f_1 (quadrature) - asinh| on [-1e3, 1e3]", e1, 1e-12));
    double e2 = 0;
    for (int k = -99; k <= 99; ++k) {
        const double t = 0.01 * k;
        e2 = std::max(e2, std::abs(f_alpha_series(0.75, t) - f_alpha_quadrature(0.75, t)));
    }
    r.measurements.push_back(below("max |series - quadrature| alpha=0.75", e2, 1e-8));
    double e3 = 0;
    for (double alpha : {0.75, 1.0}) {
        SystemSpec spec;
        spec.n = 3;
        spec.d = 2;
        spec.masses = {1.0, 2.0, 0.5};
        spec.potential = PotentialModel::uniform(3, alpha, -1.0);
        CounterRng rng(opt.seed, 10);
        for (int rep = 0; rep < 5; ++rep) {
            Vec p(6);
            for (int c = 0; c < 6; ++c) p(c) = rng.normal();
            for (double t : {0.5, 3.0, 50.0, 1e3, -20.0}) {
                const Vec a = dollard_W(spec, t, p), b = dollard_W_quadrature(spec, t, p);
                e3 = std::max(e3, max_abs(a - b) / std::max(1.0, max_abs(a)));
            }
        }
    }
    r.measurements.push_back(below("max |W factorised - W quadrature| (relative)", e3, 1e-8));
    double slack = std::numeric_limits<double>::infinity();
    for (double alpha : {0.5, 1.0, 2.0})
        for (double q : {0.0, 1.0, 5.0}) {
            const double I = smooth_abs_tail(alpha, q);
            const double s = std::pow(smooth_abs(q), -alpha);
            slack = std::min({slack, I - s / alpha, (1 / alpha + 1) * s - I});
        }
    r.measurements.push_back(above("min sandwich slack over 9 cases", slack, 0.0, false));
    return r;
}

// 11. A Galilean boost destroys the asymptote of a two-body hyperbolic orbit.
CriterionResult c11(const AcceptanceOptions&) {
    CriterionResult r;
    const SystemSpec spec = newtonian(2, 1, {1, 1});
    const double s = std::sqrt(1.1);  // energy 1 at infinity in the centre-of-mass frame
    const auto Ts = dyadic_times(1e5 / 4096, 1e5);
    for (double w : {0.0, 0.3, 1.0}) {
        Vec q(2), p(2);
        q << -5, 5;
        p << -s + w, s + w;
        const Trajectory tr = integrate(spec, PhaseState(p, q), 0.0, Ts.back(), tight(), Ts);
        const AsymptoteFit fit = fit_asymptote(spec, tr.checkpoint_t, tr.checkpoint_x);
        if (w == 0.0) {
            r.measurements.push_back(above("unboosted converges", fit.converges ? 1 : 0, 0.5));
            continue;
        }
        // transverse distance against log t over the late half: positive slope = at least logarithmic growth
        std::vector<double> lt, dist;
        for (std::size_t k = Ts.size() / 2; k < Ts.size(); ++k) {
            lt.push_back(std::log(tr.checkpoint_t[k]));
            dist.push_back(fit.residual_trend[k]);
        }
        const double growth = fit_line(lt, dist).slope;
        r.measurements.push_back(above(fmt::format("boost {} converges == false", w), fit.converges ? 0 : 1, 0.5));
        r.measurements.push_back(above(fmt::format("boost {} fitted log-coefficient", w), fit.log_coefficient, 0.0));
        r.measurements.push_back(above(fmt::format("boost {} transverse distance slope vs log t", w), growth, 0.0));
    }
    return r;
}

// 12. Orbits with equal p+ synchronise: |p2 - p1| ~ t^-2, q2 - q1 converges.
CriterionResult c12(const AcceptanceOptions&) {
    CriterionResult r;
    const SystemSpec spec = newtonian(2, 2, {1, 1});
    auto state = [](double b) {
        const KeplerHyperbola h = kepler_hyperbola(1, 1, 1, 1.0, b);
        const Eigen::Vector2d out = kepler_outgoing_direction(h);
        return kepler_two_body_state(h, 0.0, -std::atan2(out.y(), out.x()));
    };
    TransformConfig cfg;
    const SyncResult sr = pair_synchronization(spec, state(2.0), state(3.0), cfg, 1e2, 1e4);
    r.measurements.push_back(within("exponent of |p2 - p1|", sr.exponent, -2.2, -1.8, sr.halfwidth));
    r.measurements.push_back(below("Cauchy residual of q2 - q1", sr.q_cauchy, 1e-5));
    return r;
}

}  // namespace

std::vector<int> acceptance_ids() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}; }

std::string criterion_name(int id) {
    switch (id) {
        case 1: return "forward invariance and propagation sandwich";
        case 2: return "momentum decay rate and tail bound";
        case 3: return "Herbst dichotomy";
        case 4: return "Dollard-Moller conjugacy";
        case 5: return "short-range Moller fixed point, time limit, intertwining";
        case 6: return "symplecticity of the inverse Moller transform";
        case 7: return "asymptote dichotomy alpha=1 vs alpha=0.7";
        case 8: return "scattering angle vs Kepler";
        case 9: return "asymptotic offsets recover b";
        case 10: return "f_alpha, W and sandwich integral";
        case 11: return "Galilean boost destroys asymptotes";
        case 12: return "pair synchronisation";
        default: throw ValidationError(fmt::format("unknown acceptance criterion {}", id));
    }
}

bool is_known_unattainable(int id) { return id == 7; }

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
    using Fn = CriterionResult (*)(const AcceptanceOptions&);
    static const Fn table[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12};
    const std::string name = criterion_name(id);
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = table[id - 1](opt);
        r.pass = !r.measurements.empty();
        for (const auto& m : r.measurements) r.pass = r.pass && m.pass;
    } catch (const std::exception& e) {
        r.pass = false;
        r.note = std::string("exception: ") + e.what();
    }
    r.id = id;
    r.name = name;
    r.known_unattainable = is_known_unattainable(id) && !r.pass;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

CriterionResult energy_drift_check(const IntegratorConfig& cfg) {
    CriterionResult r;
    r.id = 0;
    r.name = "energy drift of a reference three-body run";
    const auto start = std::chrono::steady_clock::now();
    const SystemSpec spec = newtonian(3, 2, {1.0, 1.5, 0.8});
    Vec q(6), p(6);
    q << 0, 0, 4, 0.5, -1, 3;
    p << 0.1, -0.3, 0.6, 0.2, -0.9, 0.15;
    IntegratorConfig c = cfg;
    c.store_steps = false;
    std::vector<double> ts;
    for (int k = 1; k <= 20; ++k) ts.push_back(5.0 * k);
    const PhaseState x0(p, q);
    const Trajectory tr = integrate(spec, x0, 0.0, 100.0, c, ts);
    const double H0 = hamiltonian(spec, x0);
    double drift = 0;
    for (const auto& x : tr.checkpoint_x) drift = std::max(drift, std::abs(hamiltonian(spec, x) - H0) / std::abs(H0));
    r.measurements.push_back(above("integration completed", tr.completed() ? 1 : 0, 0.5));
    r.measurements.push_back(below("max relative energy drift", drift, 1e-8));
    r.note = fmt::format("rel_tol {:.1e}, {} steps", c.rel_tol, tr.steps);
    r.pass = true;
    for (const auto& m : r.measurements) r.pass = r.pass && m.pass;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opt) {
    std::vector<CriterionResult> out;
    for (int id : ids) out.push_back(run_criterion(id, opt));
    return out;
}

}  // namespace nbs
