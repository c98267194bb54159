#include "nbscatter/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nbs {

double SystemSpec::inv_mass_norm() const {
    return 1.0 / *std::min_element(masses.begin(), masses.end());
}

void SystemSpec::validate() const {
    if (n < 2) throw ValidationError("system: n must be >= 2");
    if (d < 1) throw ValidationError("system: d must be >= 1");
    if (static_cast<int>(masses.size()) != n)
        throw ValidationError("system: expected " + std::to_string(n) + " masses, got " +
                              std::to_string(masses.size()));
    for (double m : masses)
        if (!(m > 0) || !std::isfinite(m)) throw ValidationError("system: masses must be positive and finite");
    const auto& P = potential;
    if (!(P.alpha > 0) || !std::isfinite(P.alpha)) throw ValidationError("potential: alpha must be positive");
    if (P.coupling.rows() != n || P.coupling.cols() != n)
        throw ValidationError("potential: coupling must be n x n");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (!std::isfinite(P.coupling(i, j)))
                throw ValidationError("potential: coupling entries must be finite");
            if (std::abs(P.coupling(i, j) - P.coupling(j, i)) > 1e-14 * (1 + std::abs(P.coupling(i, j))))
                throw ValidationError("potential: coupling must be symmetric");
        }
    if (P.kind == PotentialModel::Kind::soft_power && !(P.softening > 0))
        throw ValidationError("potential: soft_power needs softening > 0");
    if (P.kind == PotentialModel::Kind::gaussian_bump && !(P.width > 0))
        throw ValidationError("potential: gaussian_bump needs width > 0");
    if (collision_radius < 0) throw ValidationError("system: collision_radius must be >= 0");
}

Vec PhaseState::packed() const {
    Vec y(q.size() + p.size());
    y << q, p;
    return y;
}

PhaseState PhaseState::unpack(const Vec& y) {
    const Eigen::Index m = y.size() / 2;
    return {y.tail(m), y.head(m)};
}

int pair_count(int n) { return n * (n - 1) / 2; }

Vec velocity(const SystemSpec& s, const Vec& p) {
    Vec v(p.size());
    for (int i = 0; i < s.n; ++i) v.segment(i * s.d, s.d) = p.segment(i * s.d, s.d) / s.masses[i];
    return v;
}

Vec momentum(const SystemSpec& s, const Vec& v) {
    Vec p(v.size());
    for (int i = 0; i < s.n; ++i) p.segment(i * s.d, s.d) = v.segment(i * s.d, s.d) * s.masses[i];
    return p;
}

double kinetic_energy(const SystemSpec& s, const Vec& p) {
    double K = 0;
    for (int i = 0; i < s.n; ++i) K += p.segment(i * s.d, s.d).squaredNorm() / (2 * s.masses[i]);
    return K;
}

double potential_energy(const SystemSpec& s, const Vec& q) {
    double V = 0;
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) {
            const double r = (q.segment(i * s.d, s.d) - q.segment(j * s.d, s.d)).norm();
            V += s.potential.radial(i, j, r).phi;
        }
    return V;
}

double hamiltonian(const SystemSpec& s, const PhaseState& x) {
    return kinetic_energy(s, x.p) + potential_energy(s, x.q);
}

Vec grad_potential(const SystemSpec& s, const Vec& q) {
    const int d = s.d;
    Vec g = Vec::Zero(q.size());
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) {
            const Vec Q = q.segment(i * d, d) - q.segment(j * d, d);
            const double r = Q.norm();
            if (r == 0) {
                if (s.potential.smooth()) continue;
                g.setConstant(std::numeric_limits<double>::quiet_NaN());
                return g;
            }
            const Vec gij = (s.potential.radial(i, j, r).dphi / r) * Q;
            g.segment(i * d, d) += gij;
            g.segment(j * d, d) -= gij;
        }
    return g;
}

Vec hess_potential_apply(const SystemSpec& s, const Vec& q, const Vec& w) {
    const int d = s.d;
    Vec out = Vec::Zero(q.size());
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) {
            const Vec Q = q.segment(i * d, d) - q.segment(j * d, d);
            const double r = Q.norm();
            const auto rad = s.potential.radial(i, j, r);
            const Vec dw = w.segment(i * d, d) - w.segment(j * d, d);
            Vec h;
            if (r == 0) {
                h = rad.ddphi * dw;
            } else {
                const Vec u = Q / r;
                const double uw = u.dot(dw);
                h = rad.ddphi * uw * u + (rad.dphi / r) * (dw - uw * u);
            }
            out.segment(i * d, d) += h;
            out.segment(j * d, d) -= h;
        }
    return out;
}

Vec total_momentum(const SystemSpec& s, const Vec& p) {
    Vec P = Vec::Zero(s.d);
    for (int i = 0; i < s.n; ++i) P += p.segment(i * s.d, s.d);
    return P;
}

PairStats pair_stats(const SystemSpec& s, const PhaseState& x) {
    const int d = s.d;
    const Vec v = velocity(s, x.p);
    PairStats st;
    st.q_min = st.v_min = std::numeric_limits<double>::infinity();
    st.q_max = st.v_max = 0;
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) {
            const Vec Q = x.q.segment(i * d, d) - x.q.segment(j * d, d);
            const Vec U = v.segment(i * d, d) - v.segment(j * d, d);
            const double qn = Q.norm(), vn = U.norm();
            st.q_ij.push_back(qn);
            st.v_ij.push_back(vn);
            st.radial.push_back(U.dot(Q));
            st.q_min = std::min(st.q_min, qn);
            st.q_max = std::max(st.q_max, qn);
            st.v_min = std::min(st.v_min, vn);
            st.v_max = std::max(st.v_max, vn);
        }
    return st;
}

double q_min(const SystemSpec& s, const Vec& q) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j)
            m = std::min(m, (q.segment(i * s.d, s.d) - q.segment(j * s.d, s.d)).norm());
    return m;
}

Vec relative_acceleration(const SystemSpec& s, const Vec& q, int i, int j) {
    if (i == j || i < 0 || j < 0 || i >= s.n || j >= s.n)
        throw ValidationError("relative_acceleration: need distinct particle indices");
    const Vec g = grad_potential(s, q);
    return g.segment(i * s.d, s.d) / s.masses[i] - g.segment(j * s.d, s.d) / s.masses[j];
}

}  // namespace nbs
