#include "nbscatter/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nbs {

const char* to_string(Comparison c) { return c == Comparison::free ? "free" : "dollard"; }

Comparison default_comparison(const SystemSpec& spec) {
    return spec.potential.alpha > 1 ? Comparison::free : Comparison::dollard;
}

namespace {

std::vector<double> signed_times(const TransformConfig& cfg, int direction) {
    if (direction != 1 && direction != -1) throw ValidationError("direction must be +1 or -1");
    auto Ts = dyadic_times(cfg.T_first, cfg.T_max);
    if (Ts.size() < 3) throw ValidationError("transform: need at least three dyadic checkpoints below T_max");
    for (double& t : Ts) t *= direction;
    return Ts;
}

Trajectory checkpointed(const SystemSpec& spec, const PhaseState& x0, const std::vector<double>& Ts,
                        const TransformConfig& cfg) {
    Trajectory tr = integrate(spec, x0, 0.0, Ts.back(), cfg.integrator, Ts);
    if (tr.status == StopReason::collision)
        throw NotFreeError("collision at t = " + std::to_string(tr.t_end));
    if (!tr.completed())
        throw NonConvergenceError(std::string("integration stopped (") + to_string(tr.status) +
                                  ") at t = " + std::to_string(tr.t_end));
    return tr;
}

// Every pair moving apart along the direction of time, its distance growing by at
// least half the relative speed times the last checkpoint gap, with positive pair energy.
bool is_dispersing(const SystemSpec& spec, const Trajectory& tr, int direction) {
    const std::size_t N = tr.checkpoint_x.size();
    if (N < 2) return false;
    const PairStats a = pair_stats(spec, tr.checkpoint_x[N - 2]);
    const PairStats b = pair_stats(spec, tr.checkpoint_x[N - 1]);
    const double dt = std::abs(tr.checkpoint_t[N - 1] - tr.checkpoint_t[N - 2]);
    std::size_t e = 0;
    for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j, ++e) {
            if (direction * b.radial[e] <= 0) return false;
            if (b.q_ij[e] - a.q_ij[e] < 0.5 * b.v_ij[e] * dt) return false;
            const double mu = spec.masses[i] * spec.masses[j] / (spec.masses[i] + spec.masses[j]);
            if (0.5 * mu * b.v_ij[e] * b.v_ij[e] + spec.potential.radial(i, j, b.q_ij[e]).phi <= 0) return false;
        }
    return true;
}

// min over pairs of <Q, U> / |U|^2 (after time reversal when direction < 0), clamped at 0.
double elapsed_free_time(const SystemSpec& spec, const PhaseState& x, int direction) {
    const Vec v = velocity(spec, x.p);
    const int d = spec.d;
    double tau = std::numeric_limits<double>::infinity();
    for (int i = 0; i < spec.n; ++i)
        for (int j = i + 1; j < spec.n; ++j) {
            const Vec Q = x.q.segment(i * d, d) - x.q.segment(j * d, d);
            const Vec U = direction * (v.segment(i * d, d) - v.segment(j * d, d));
            const double u2 = U.squaredNorm();
            tau = std::min(tau, u2 > 0 ? Q.dot(U) / u2 : 0.0);
        }
    return std::isfinite(tau) ? std::max(0.0, tau) : 0.0;
}

Vec pack(const Vec& a, const Vec& b) {
    Vec y(a.size() + b.size());
    y << a, b;
    return y;
}

LimitEstimate fit_limit(const std::vector<double>& Ts, const std::vector<Vec>& ys, const std::vector<Vec>& dys,
                        const LimitBasis& basis, const TransformConfig& cfg) {
    if (cfg.use_derivatives && !dys.empty()) return extrapolate(Ts, ys, dys, basis, cfg.tol, cfg.window);
    return extrapolate(Ts, ys, basis, cfg.tol, cfg.value_window);
}

ScatteringDatum finish(ScatteringDatum d, const std::vector<double>& Ts, std::vector<Vec> ys,
                       const std::vector<Vec>& dys, const LimitBasis& basis, const TransformConfig& cfg,
                       bool with_r) {
    const LimitEstimate est = fit_limit(Ts, ys, dys, basis, cfg);
    const Eigen::Index m = with_r ? est.value.size() / 2 : est.value.size();
    d.p = est.value.head(m);
    if (with_r) d.r = est.value.tail(m);
    d.residual = est.cauchy;
    d.rate = est.rate;
    d.converged = est.converged;
    d.T = Ts;
    d.samples = std::move(ys);
    d.derivatives = dys;
    if (cfg.require_convergence && !d.converged)
        throw NonConvergenceError("limit not settled: Cauchy residual " + std::to_string(d.residual));
    return d;
}

}  // namespace

ScatteringDatum asymptotic_velocity(const SystemSpec& spec, const PhaseState& x0, int direction,
                                    const TransformConfig& cfg) {
    spec.validate();
    // The tail decays in powers of the time since the straight-line closest approach,
    // so the ladder is dyadic in T + tau rather than in T.
    const double tau = elapsed_free_time(spec, x0, direction);
    auto Ts = signed_times(cfg, direction);
    for (std::size_t k = 0; k < Ts.size(); ++k) Ts[k] = direction * ((tau + cfg.T_first) * std::ldexp(1.0, static_cast<int>(k)) - tau);
    ScatteringDatum d;
    d.direction = direction;
    Trajectory tr = integrate(spec, x0, 0.0, Ts.back(), cfg.integrator, Ts);
    if (!tr.completed()) {
        d.p = tr.x_end.p;
        d.converged = false;
        d.residual = std::numeric_limits<double>::infinity();
        return d;
    }
    d.dispersing = is_dispersing(spec, tr, direction);

    const FreeRegionParams prm = FreeRegionParams::defaults(spec);
    const double a = spec.potential.alpha;
    const double s1 = seminorm(spec, 1).value;
    for (std::size_t k = 0; k < tr.checkpoint_x.size(); ++k) {
        PhaseState x = tr.checkpoint_x[k];
        if (direction < 0) x.p = -x.p;  // time reversal
        if (membership(spec, x, prm).inside) {
            const PairStats ps = pair_stats(spec, x);
            d.entered = true;
            d.entry_checkpoint = tr.checkpoint_t[k];
            d.tail_bound = 2 * s1 / (a * ps.v_min * std::pow(ps.q_min, a));
        }
    }
    std::vector<Vec> ys, dys;
    for (const auto& x : tr.checkpoint_x) {
        ys.push_back(x.p);
        dys.push_back(-grad_potential(spec, x.q));
    }
    const bool require = cfg.require_convergence;
    TransformConfig c = cfg;
    c.require_convergence = false;
    std::vector<double> Tf = tr.checkpoint_t;
    for (double& t : Tf) t += direction * tau;
    d = finish(d, Tf, std::move(ys), dys, tail_basis(a, 0.0, cfg.basis_terms), c, false);
    d.T = tr.checkpoint_t;
    d.converged = d.converged && d.dispersing;
    if (require && !d.converged) throw NonConvergenceError("asymptotic velocity not settled");
    return d;
}

ScatteringDatum inverse_moller(const SystemSpec& spec, const PhaseState& x0, int direction, Comparison comp,
                               const TransformConfig& cfg) {
    spec.validate();
    const double a = spec.potential.alpha;
    if (comp == Comparison::dollard && !(a > 0.5))
        throw DomainError("Dollard comparison needs alpha > 1/2");
    if (comp == Comparison::free && !(a > 1)) throw DomainError("free comparison needs alpha > 1");
    const auto Ts = signed_times(cfg, direction);
    const Trajectory tr = checkpointed(spec, x0, Ts, cfg);
    if (!is_dispersing(spec, tr, direction)) throw NotFreeError("orbit does not disperse by the horizon");
    std::vector<Vec> ys, dys;
    for (std::size_t k = 0; k < tr.checkpoint_x.size(); ++k) {
        const double T = tr.checkpoint_t[k];
        const PhaseState& x = tr.checkpoint_x[k];
        const Vec pdot = -grad_potential(spec, x.q);
        Vec r = x.q - T * velocity(spec, x.p);
        Vec rdot = -T * velocity(spec, pdot);
        if (comp == Comparison::dollard) {
            r -= dollard_W(spec, T, x.p);
            rdot -= dollard_W_dt(spec, T, x.p) + dollard_W_dp(spec, T, x.p, pdot);
        }
        ys.push_back(pack(x.p, r));
        dys.push_back(pack(pdot, rdot));
    }
    ScatteringDatum d;
    d.direction = direction;
    d.dispersing = true;
    return finish(d, tr.checkpoint_t, std::move(ys), dys, tail_basis(a, 1.0, cfg.basis_terms), cfg, true);
}

ScatteringDatum inverse_moller_dollard(const SystemSpec& spec, const PhaseState& x0, int direction,
                                       const TransformConfig& cfg) {
    return inverse_moller(spec, x0, direction, Comparison::dollard, cfg);
}

ScatteringDatum moller_time_limit(const SystemSpec& spec, const PhaseState& X, int direction, Comparison comp,
                                  const TransformConfig& cfg) {
    spec.validate();
    const double a = spec.potential.alpha;
    if (comp == Comparison::dollard && !(a > 0.5))
        throw DomainError("Dollard comparison needs alpha > 1/2");
    if (comp == Comparison::free && !(a > 1)) throw DomainError("free comparison needs alpha > 1");
    const auto Ts = signed_times(cfg, direction);
    std::vector<Vec> ys;
    for (double T : Ts) {
        const PhaseState Y = comp == Comparison::free ? free_flow(spec, X, T) : dollard_flow(spec, T, 0.0, X);
        const Trajectory tr = integrate(spec, Y, T, 0.0, cfg.integrator);
        if (tr.status == StopReason::collision)
            throw NotFreeError("collision while pulling back from T = " + std::to_string(T));
        if (!tr.completed()) throw NonConvergenceError("integration stopped while pulling back");
        ys.push_back(pack(tr.x_end.p, tr.x_end.q));
    }
    ScatteringDatum d;
    d.direction = direction;
    return finish(d, Ts, std::move(ys), {}, tail_basis(a, 1.0, cfg.basis_terms), cfg, true);
}

Vec project_perp(const Vec& w, const Vec& v) {
    const double vv = v.squaredNorm();
    if (vv == 0) return w;
    return w - v * (w.dot(v) / vv);
}

OffsetResult asymptotic_offset(const SystemSpec& spec, const PhaseState& x, const PhaseState& x_ref,
                               const TransformConfig& cfg) {
    spec.validate();
    const auto Ts = signed_times(cfg, 1);
    const Trajectory a = checkpointed(spec, x, Ts, cfg);
    const Trajectory b = checkpointed(spec, x_ref, Ts, cfg);
    std::vector<Vec> dq, ddq;
    for (std::size_t k = 0; k < Ts.size(); ++k) {
        dq.push_back(a.checkpoint_x[k].q - b.checkpoint_x[k].q);
        ddq.push_back(velocity(spec, a.checkpoint_x[k].p - b.checkpoint_x[k].p));
    }
    const LimitEstimate est = fit_limit(Ts, dq, ddq, tail_basis(spec.potential.alpha, 0.0, cfg.basis_terms), cfg);
    const Vec v = velocity(spec, asymptotic_velocity(spec, x_ref, 1, cfg).p);
    OffsetResult res;
    res.limit = est.value;
    res.offset = project_perp(est.value, v);
    const double on = res.offset.norm();
    res.orthogonality = on > 0 ? std::abs(res.offset.dot(v)) / (on * v.norm()) : 0.0;
    res.residual = est.cauchy;
    res.converged = est.converged;
    return res;
}

SyncResult pair_synchronization(const SystemSpec& spec, const PhaseState& x1, const PhaseState& x2,
                                const TransformConfig& cfg, double t_lo, double t_hi) {
    spec.validate();
    const auto Ts = signed_times(cfg, 1);
    const Trajectory a = checkpointed(spec, x1, Ts, cfg);
    const Trajectory b = checkpointed(spec, x2, Ts, cfg);
    SyncResult res;
    std::vector<Vec> dq, ddq;
    std::vector<double> ft, fp;
    for (std::size_t k = 0; k < Ts.size(); ++k) {
        const double dp = (b.checkpoint_x[k].p - a.checkpoint_x[k].p).norm();
        res.t.push_back(Ts[k]);
        res.dp.push_back(dp);
        dq.push_back(b.checkpoint_x[k].q - a.checkpoint_x[k].q);
        ddq.push_back(velocity(spec, b.checkpoint_x[k].p - a.checkpoint_x[k].p));
        if ((t_lo <= 0 || Ts[k] >= t_lo * (1 - 1e-12)) && (t_hi <= 0 || Ts[k] <= t_hi * (1 + 1e-12))) {
            ft.push_back(Ts[k]);
            fp.push_back(dp);
        }
    }
    const LineFit fit = fit_loglog(ft, fp);
    res.exponent = fit.slope;
    res.halfwidth = fit.halfwidth;
    const LimitEstimate est = fit_limit(Ts, dq, ddq, tail_basis(spec.potential.alpha, 0.0, cfg.basis_terms), cfg);
    res.q_limit = est.value;
    res.q_cauchy = est.cauchy;
    res.converged = est.converged;
    return res;
}

ScatterResult scattering_map(const SystemSpec& spec, const PhaseState& X_in, const TransformConfig& cfg) {
    ScatterResult res;
    res.comparison = default_comparison(spec);
    res.incoming = moller_time_limit(spec, X_in, -1, res.comparison, cfg);
    res.x0 = res.incoming.state();
    // moller_time_limit returns the packed (p, q) of Omega_- X_in
    res.outgoing = inverse_moller(spec, res.x0, 1, res.comparison, cfg);
    return res;
}

double deflection_angle(const SystemSpec& spec, const Vec& p_in, const Vec& p_out) {
    const int d = spec.d;
    const Vec vi = velocity(spec, p_in), vo = velocity(spec, p_out);
    const Vec ui = vi.segment(0, d) - vi.segment(d, d);
    const Vec uo = vo.segment(0, d) - vo.segment(d, d);
    // atan2 of |u x w| and <u, w> stays accurate near 0 and pi, unlike acos
    const double dot = ui.dot(uo);
    const double cross = std::sqrt(std::max(0.0, ui.squaredNorm() * uo.squaredNorm() - dot * dot));
    return std::atan2(cross, dot);
}

SymplecticReport symplectic_residual(const std::function<PhaseState(const PhaseState&)>& map, const PhaseState& x,
                                     double h) {
    const Vec z = x.packed();
    const Eigen::Index N = z.size(), m = N / 2;
    SymplecticReport rep;
    rep.J.resize(N, N);
    for (Eigen::Index c = 0; c < N; ++c) {
        Vec zp = z, zm = z;
        zp(c) += h;
        zm(c) -= h;
        const Vec fp = map(PhaseState::unpack(zp)).packed();
        const Vec fm = map(PhaseState::unpack(zm)).packed();
        rep.J.col(c) = (fp - fm) / (2 * h);
    }
    Mat S = Mat::Zero(N, N);
    S.topRightCorner(m, m) = Mat::Identity(m, m);
    S.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
    rep.residual = (rep.J.transpose() * S * rep.J - S).cwiseAbs().maxCoeff();
    return rep;
}

}  // namespace nbs
