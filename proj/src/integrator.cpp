#include <algorithm>
#include <cmath>

#include "dop853_tableau.hpp"
#include "nbscatter/flows.hpp"

namespace nbs {

namespace {

struct Rhs {
    const SystemSpec& spec;
    std::size_t evals = 0;

    Vec operator()(const Vec& y) {
        ++evals;
        const Eigen::Index m = y.size() / 2;
        Vec dy(y.size());
        dy.head(m) = velocity(spec, y.tail(m));
        dy.tail(m) = -grad_potential(spec, y.head(m));
        return dy;
    }
};

double rms(const Vec& v) { return std::sqrt(v.squaredNorm() / static_cast<double>(v.size())); }

double initial_step(Rhs& rhs, const Vec& y, const Vec& f, double dir, double rtol, double atol) {
    const Vec scale = (y.cwiseAbs() * rtol).array() + atol;
    const double d0 = rms(y.cwiseQuotient(scale));
    const double d1 = rms(f.cwiseQuotient(scale));
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    const Vec f1 = rhs(y + dir * h0 * f);
    const double d2 = rms((f1 - f).cwiseQuotient(scale)) / h0;
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                   : std::pow(0.01 / std::max(d1, d2), 1.0 / 8);
    return std::min(100 * h0, h1);
}

double resolve_collision_radius(const SystemSpec& spec, const PhaseState& x0, const IntegratorConfig& cfg) {
    if (spec.potential.smooth()) return 0;
    if (cfg.collision_radius > 0) return cfg.collision_radius;
    if (spec.collision_radius > 0) return spec.collision_radius;
    return 1e-6 * q_min(spec, x0.q);
}

// Clip-to targets: requested checkpoints strictly inside (t0, t1], then t1.
struct Stops {
    std::vector<double> t;
    std::vector<bool> requested;
};

Stops make_stops(double t0, double t1, std::vector<double> cps) {
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    std::sort(cps.begin(), cps.end(), [dir](double a, double b) { return dir * a < dir * b; });
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    Stops s;
    bool t1_requested = false;
    for (double c : cps) {
        if (c == t1) t1_requested = true;
        if (dir * (c - t0) > 0 && dir * (t1 - c) > 0) {
            s.t.push_back(c);
            s.requested.push_back(true);
        }
    }
    s.t.push_back(t1);
    s.requested.push_back(t1_requested);
    return s;
}

struct Recorder {
    Trajectory& tr;
    const IntegratorConfig& cfg;

    void step(double t, const Vec& y) {
        if (cfg.store_steps) {
            tr.t.push_back(t);
            tr.x.push_back(PhaseState::unpack(y));
        }
    }
    void checkpoint(double t, const Vec& y) {
        tr.checkpoint_t.push_back(t);
        tr.checkpoint_x.push_back(PhaseState::unpack(y));
    }
};

void run_dop853(const SystemSpec& spec, Trajectory& tr, Vec y, double t0, double t1, const IntegratorConfig& cfg,
                const Stops& stops, const StepObserver& observer, Rhs& rhs) {
    using namespace dop853;
    Recorder rec{tr, cfg};
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double rtol = cfg.rel_tol, atol = cfg.abs_tol;
    const Eigen::Index m2 = y.size();
    double t = t0;
    Vec f = rhs(y);
    double h_abs = cfg.first_step > 0 ? cfg.first_step : initial_step(rhs, y, f, dir, rtol, atol);
    std::vector<Vec> K(16, Vec(m2));
    std::size_t next = 0;
    tr.status = StopReason::completed;

    while (true) {
        if (tr.steps >= cfg.max_steps) {
            tr.status = StopReason::max_steps;
            break;
        }
        const double target = stops.t[next];
        const double min_step = 10 * std::abs(std::nextafter(t, dir * INFINITY) - t);
        h_abs = std::min(h_abs, cfg.max_step);
        if (h_abs < min_step) h_abs = min_step;

        bool accepted = false, rejected = false, hit = false, underflow = false;
        double h = 0, t_new = t;
        Vec y_new, f_new;
        while (!accepted) {
            if (h_abs < min_step) {
                underflow = true;
                break;
            }
            t_new = t + dir * h_abs;
            hit = dir * (t_new - target) >= 0;
            if (hit) t_new = target;
            h = t_new - t;
            h_abs = std::abs(h);

            K[0] = f;
            for (int s = 1; s < 12; ++s) {
                Vec dy = A[s][0] * K[0];
                for (int j = 1; j < s; ++j)
                    if (A[s][j] != 0) dy += A[s][j] * K[j];
                K[s] = rhs(y + h * dy);
            }
            Vec incr = B[0] * K[0];
            for (int j = 1; j < 12; ++j) incr += B[j] * K[j];
            y_new = y + h * incr;
            f_new = rhs(y_new);
            K[12] = f_new;

            const Vec scale = (y.cwiseAbs().cwiseMax(y_new.cwiseAbs()) * rtol).array() + atol;
            Vec e5 = Vec::Zero(m2), e3 = Vec::Zero(m2);
            for (int j = 0; j < 13; ++j) {
                if (E5[j] != 0) e5 += E5[j] * K[j];
                if (E3[j] != 0) e3 += E3[j] * K[j];
            }
            const double n5 = e5.cwiseQuotient(scale).squaredNorm();
            const double n3 = e3.cwiseQuotient(scale).squaredNorm();
            double err = 0;
            if (n5 != 0 || n3 != 0) err = h_abs * n5 / std::sqrt((n5 + 0.01 * n3) * static_cast<double>(m2));

            if (err < 1) {
                double factor = err == 0 ? 10.0 : std::min(10.0, 0.9 * std::pow(err, -1.0 / 8));
                if (rejected) factor = std::min(1.0, factor);
                h_abs *= factor;
                accepted = true;
            } else {
                h_abs *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 8));
                rejected = true;
                ++tr.rejected;
            }
        }
        if (underflow) {
            tr.status = StopReason::step_underflow;
            break;
        }

        if (cfg.dense) {
            for (int s = 13; s < 16; ++s) {
                Vec dy = A[s][0] * K[0];
                for (int j = 1; j < s; ++j)
                    if (A[s][j] != 0) dy += A[s][j] * K[j];
                K[s] = rhs(y + h * dy);
            }
            DenseSegment seg;
            seg.t0 = t;
            seg.t1 = t_new;
            seg.y0 = y;
            seg.F.resize(7, m2);
            const Vec dy = y_new - y;
            seg.F.row(0) = dy.transpose();
            seg.F.row(1) = (h * f - dy).transpose();
            seg.F.row(2) = (2 * dy - h * (f_new + f)).transpose();
            for (int i = 0; i < 4; ++i) {
                Vec acc = Vec::Zero(m2);
                for (int j = 0; j < 16; ++j)
                    if (D[i][j] != 0) acc += D[i][j] * K[j];
                seg.F.row(3 + i) = (h * acc).transpose();
            }
            tr.dense.push_back(std::move(seg));
        }

        t = t_new;
        y = std::move(y_new);
        f = std::move(f_new);
        ++tr.steps;
        rec.step(t, y);

        if (hit) {
            if (stops.requested[next]) rec.checkpoint(t, y);
            if (++next == stops.t.size()) break;
        }
        if (tr.collision_radius > 0 && q_min(spec, y.head(m2 / 2)) < tr.collision_radius) {
            tr.status = StopReason::collision;
            break;
        }
        if (observer && !observer(t, PhaseState::unpack(y))) {
            tr.status = StopReason::observer;
            break;
        }
    }
    tr.t_end = t;
    tr.x_end = PhaseState::unpack(y);
}

// Sixth-order Yoshida composition of kick-drift-kick leapfrog.
void run_symplectic6(const SystemSpec& spec, Trajectory& tr, Vec y, double t0, double t1,
                     const IntegratorConfig& cfg, const Stops& stops, const StepObserver& observer, Rhs& rhs) {
    static const double w1 = -1.17767998417887, w2 = 0.235573213359357, w3 = 0.784513610477560;
    static const double w0 = 1 - 2 * (w1 + w2 + w3);
    static const double weights[7] = {w3, w2, w1, w0, w1, w2, w3};
    Recorder rec{tr, cfg};
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const Eigen::Index m = y.size() / 2;
    if (!(cfg.fixed_step > 0)) throw ValidationError("integrator: fixed_step must be positive");
    double t = t0;
    std::size_t next = 0;
    tr.status = StopReason::completed;
    Vec q = y.head(m), p = y.tail(m);
    Vec g = grad_potential(spec, q);
    ++rhs.evals;
    while (true) {
        if (tr.steps >= cfg.max_steps) {
            tr.status = StopReason::max_steps;
            break;
        }
        const double target = stops.t[next];
        double h = dir * cfg.fixed_step;
        const bool hit = dir * (t + h - target) >= 0;
        if (hit) h = target - t;
        for (double w : weights) {
            const double hw = w * h;
            p -= 0.5 * hw * g;
            q += hw * velocity(spec, p);
            g = grad_potential(spec, q);
            ++rhs.evals;
            p -= 0.5 * hw * g;
        }
        t = hit ? target : t + h;
        ++tr.steps;
        y << q, p;
        rec.step(t, y);
        if (hit) {
            if (stops.requested[next]) rec.checkpoint(t, y);
            if (++next == stops.t.size()) break;
        }
        if (tr.collision_radius > 0 && q_min(spec, q) < tr.collision_radius) {
            tr.status = StopReason::collision;
            break;
        }
        if (observer && !observer(t, PhaseState(p, q))) {
            tr.status = StopReason::observer;
            break;
        }
    }
    tr.t_end = t;
    tr.x_end = PhaseState(p, q);
}

}  // namespace

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::completed: return "completed";
        case StopReason::collision: return "collision";
        case StopReason::max_steps: return "max_steps";
        case StopReason::step_underflow: return "step_underflow";
        case StopReason::observer: return "observer";
    }
    return "?";
}

Vec DenseSegment::eval(double t) const {
    const double x = (t - t0) / (t1 - t0);
    Vec y = Vec::Zero(y0.size());
    for (int i = 0; i < 7; ++i) {
        y += F.row(6 - i).transpose();
        y *= (i % 2 == 0) ? x : 1 - x;
    }
    return y + y0;
}

PhaseState Trajectory::dense_eval(double tq) const {
    if (dense.empty()) {
        if (!t.empty() && tq == t.front()) return x.front();
        throw ValidationError("dense_eval: trajectory has no dense output");
    }
    const double dir = dense.front().t1 >= dense.front().t0 ? 1.0 : -1.0;
    const double lo = dense.front().t0, hi = dense.back().t1;
    if (dir * (tq - lo) < 0 || dir * (tq - hi) > 0) throw ValidationError("dense_eval: time outside trajectory");
    auto it = std::lower_bound(dense.begin(), dense.end(), tq,
                               [dir](const DenseSegment& s, double v) { return dir * s.t1 < dir * v; });
    if (it == dense.end()) it = std::prev(dense.end());
    return PhaseState::unpack(it->eval(tq));
}

Trajectory integrate(const SystemSpec& spec, const PhaseState& x0, double t0, double t1, const IntegratorConfig& cfg,
                     std::vector<double> checkpoints, const StepObserver& observer) {
    if (x0.p.size() != spec.dim() || x0.q.size() != spec.dim())
        throw ValidationError("integrate: state dimension does not match n*d");
    if (!std::isfinite(t0) || !std::isfinite(t1)) throw ValidationError("integrate: non-finite time");
    Trajectory tr;
    tr.collision_radius = resolve_collision_radius(spec, x0, cfg);
    const bool t0_requested = std::find(checkpoints.begin(), checkpoints.end(), t0) != checkpoints.end();
    if (cfg.store_steps) {
        tr.t.push_back(t0);
        tr.x.push_back(x0);
    }
    if (t0_requested) {
        tr.checkpoint_t.push_back(t0);
        tr.checkpoint_x.push_back(x0);
    }
    tr.t_end = t0;
    tr.x_end = x0;
    if (t1 == t0) return tr;
    const Stops stops = make_stops(t0, t1, std::move(checkpoints));
    Rhs rhs{spec};
    if (cfg.method == IntegratorMethod::dop853)
        run_dop853(spec, tr, x0.packed(), t0, t1, cfg, stops, observer, rhs);
    else
        run_symplectic6(spec, tr, x0.packed(), t0, t1, cfg, stops, observer, rhs);
    tr.evaluations = rhs.evals;
    return tr;
}

PhaseState flow(const SystemSpec& spec, const PhaseState& x0, double t, const IntegratorConfig& cfg) {
    IntegratorConfig c = cfg;
    c.store_steps = false;
    c.dense = false;
    const Trajectory tr = integrate(spec, x0, 0.0, t, c);
    if (tr.status == StopReason::collision)
        throw NotFreeError("flow: collision at t = " + std::to_string(tr.t_end));
    if (!tr.completed())
        throw NonConvergenceError(std::string("flow: integration stopped (") + to_string(tr.status) + ") at t = " +
                                  std::to_string(tr.t_end));
    return tr.x_end;
}

PhaseState free_flow(const SystemSpec& spec, const PhaseState& x, double t) {
    return {x.p, x.q + t * velocity(spec, x.p)};
}

std::vector<double> dyadic_times(double t0, double t_max) {
    std::vector<double> out;
    if (!(t0 > 0)) throw ValidationError("dyadic_times: t0 must be positive");
    for (double t = t0; t <= t_max * (1 + 1e-12); t *= 2) out.push_back(t);
    return out;
}

}  // namespace nbs
