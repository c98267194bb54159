#include "nbscatter/free_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nbs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

FreeRegionParams FreeRegionParams::defaults(const SystemSpec& spec) {
    return defaults(spec, spec.potential.alpha > 1);
}

FreeRegionParams FreeRegionParams::defaults(const SystemSpec& spec, bool short_range) {
    const double a = spec.potential.alpha;
    FreeRegionParams prm;
    prm.short_range = short_range;
    prm.delta = std::min(a / (4 + a), 0.2);
    if (short_range) {
        if (!(a > 1)) throw DomainError("free region: short-range parameters need alpha > 1");
        prm.delta = std::min(prm.delta, a - 1);
    }
    prm.C = 16.0 * spec.d * spec.n * seminorm(spec, 2).value / prm.delta;
    return prm;
}

double Membership::min_margin() const { return std::min({margin1, margin2, margin3}); }

Membership membership(const SystemSpec& spec, const PhaseState& x, const FreeRegionParams& prm) {
    const PairStats ps = pair_stats(spec, x);
    Membership m;
    const double a = spec.potential.alpha;
    if (ps.v_min == 0 || ps.q_min == 0) {
        m.margin1 = -kInf;
        m.margin2 = -kInf;
        m.margin3 = -kInf;
        m.inside = false;
        return m;
    }
    m.margin1 = 1 - prm.C * ps.q_max / (std::pow(ps.q_min, a + 1) * ps.v_min * ps.v_min);
    double cos_min = kInf, rmin = kInf, rmax = 0;
    for (std::size_t k = 0; k < ps.q_ij.size(); ++k) {
        cos_min = std::min(cos_min, ps.radial[k] / (ps.v_ij[k] * ps.q_ij[k]));
        const double ratio = ps.q_ij[k] / ps.v_ij[k];
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
    }
    m.margin2 = cos_min - (1 - prm.delta);
    m.margin3 = (1 + 2 * prm.delta) * rmin / rmax - 1;
    m.inside = m.margin1 > prm.eps_margin && m.margin2 > prm.eps_margin && m.margin3 > prm.eps_margin;
    return m;
}

EntryResult entry_time(const SystemSpec& spec, const PhaseState& x0, const FreeRegionParams& prm, double t_max,
                       const IntegratorConfig& cfg) {
    EntryResult res;
    if (membership(spec, x0, prm).inside) {
        res.found = true;
        res.x = x0;
        return res;
    }
    IntegratorConfig c = cfg;
    c.dense = true;
    c.store_steps = false;
    double t_prev = 0;
    bool hit = false;
    double t_hit = 0;
    const Trajectory tr = integrate(spec, x0, 0.0, t_max, c, {}, [&](double t, const PhaseState& x) {
        if (membership(spec, x, prm).inside) {
            hit = true;
            t_hit = t;
            return false;
        }
        t_prev = t;
        return true;
    });
    res.status = tr.status;
    if (!hit) return res;
    double lo = t_prev, hi = t_hit;
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (membership(spec, tr.dense_eval(mid), prm).inside)
            hi = mid;
        else
            lo = mid;
    }
    res.found = true;
    res.t = hi;
    res.x = tr.dense_eval(hi);
    return res;
}

PropagationReport propagation_check(const SystemSpec& spec, const PhaseState& x0, const std::vector<double>& t,
                                    const std::vector<PhaseState>& x, double slack) {
    if (t.size() != x.size()) throw ValidationError("propagation_check: times and states differ in length");
    const PairStats p0 = pair_stats(spec, x0);
    PropagationReport rep;
    rep.worst_lower = rep.worst_upper = kInf;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] <= 0) continue;
        const PairStats pk = pair_stats(spec, x[k]);
        for (std::size_t e = 0; e < pk.q_ij.size(); ++e) {
            const double vt = p0.v_ij[e] * t[k];
            const double dq = pk.q_ij[e] - p0.q_ij[e];
            rep.worst_lower = std::min(rep.worst_lower, (dq - 0.5 * vt) / vt);
            rep.worst_upper = std::min(rep.worst_upper, (1.5 * vt - dq) / vt);
            ++rep.checked;
        }
    }
    rep.ok = rep.checked == 0 || (rep.worst_lower >= -slack && rep.worst_upper >= -slack);
    return rep;
}

PhaseState sample_free_state(const SystemSpec& spec, const FreeRegionParams& prm, CounterRng& rng,
                             const SamplerOptions& opt) {
    const int n = spec.n, d = spec.d;
    double mtot = 0;
    for (double m : spec.masses) mtot += m;
    for (int attempt = 0; attempt < opt.max_tries; ++attempt) {
        Vec v(spec.dim());
        for (int i = 0; i < n; ++i) {
            Vec u(d);
            for (int a = 0; a < d; ++a) u(a) = rng.normal();
            const double un = u.norm();
            if (un == 0) continue;
            v.segment(i * d, d) = u / un * rng.uniform(opt.speed_lo, opt.speed_hi);
        }
        Vec vcm = Vec::Zero(d);
        for (int i = 0; i < n; ++i) vcm += spec.masses[i] * v.segment(i * d, d);
        vcm /= mtot;
        for (int i = 0; i < n; ++i) v.segment(i * d, d) -= vcm;

        Vec jitter(spec.dim());
        for (int i = 0; i < n; ++i) {
            Vec u(d);
            for (int a = 0; a < d; ++a) u(a) = rng.normal();
            const double r = opt.perturbation * std::pow(rng.uniform(), 1.0 / d);
            jitter.segment(i * d, d) = u.normalized() * r;
        }
        const Vec p = momentum(spec, v);
        if (pair_stats(spec, PhaseState(p, Vec::Zero(spec.dim()))).v_min < opt.min_pair_speed) continue;

        // Grow t until inequality (1) holds with a factor-2 margin and (2), (3) hold.
        for (double t = 1.0; t < 1e15; t *= 2) {
            const PhaseState x(p, t * v + jitter);
            const Membership m = membership(spec, x, prm);
            if (m.margin1 >= 0.5 && m.margin2 > prm.eps_margin && m.margin3 > prm.eps_margin) {
                if (m.inside) return x;
                break;
            }
        }
    }
    throw NonConvergenceError("sample_free_state: no admissible state after max_tries draws");
}

}  // namespace nbs
