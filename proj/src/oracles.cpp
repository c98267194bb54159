#include "nbscatter/oracles.hpp"

#include <cmath>

#include "nbscatter/limits.hpp"
#include "nbscatter/scattering.hpp"

namespace nbs {

double KeplerHyperbola::deflection() const { return 2 * std::asin(1 / e); }

KeplerHyperbola kepler_hyperbola(double m1, double m2, double k, double v_inf, double b) {
    if (!(m1 > 0 && m2 > 0 && k > 0 && v_inf > 0 && b >= 0))
        throw ValidationError("kepler_hyperbola: needs positive masses, k, v_inf and b >= 0");
    KeplerHyperbola h;
    h.m1 = m1;
    h.m2 = m2;
    h.k = k;
    h.mu = m1 * m2 / (m1 + m2);
    h.kappa = k / h.mu;
    h.v_inf = v_inf;
    h.b = b;
    h.a = h.kappa / (v_inf * v_inf);
    h.e = std::hypot(1.0, b * v_inf * v_inf / h.kappa);
    h.n = std::sqrt(h.kappa / (h.a * h.a * h.a));
    return h;
}

double hyperbolic_anomaly(double e, double M, double tol) {
    if (!(e > 1)) throw DomainError("hyperbolic_anomaly: eccentricity must exceed 1");
    double H = M == 0 ? 0.0 : std::copysign(std::log(2 * std::abs(M) / e + 1.8), M);
    for (int it = 0; it < 100; ++it) {
        const double f = e * std::sinh(H) - H - M;
        const double dH = f / (e * std::cosh(H) - 1);
        H -= dH;
        if (std::abs(dH) <= tol * std::max(1.0, std::abs(H))) return H;
    }
    throw NonConvergenceError("hyperbolic_anomaly: Newton iteration did not converge");
}

RelativeOrbitState kepler_relative_state(const KeplerHyperbola& h, double t) {
    const double H = hyperbolic_anomaly(h.e, h.n * t);
    const double bs = h.a * std::sqrt(h.e * h.e - 1);
    const double Hdot = h.n / (h.e * std::cosh(H) - 1);
    RelativeOrbitState s;
    s.r << h.a * (h.e - std::cosh(H)), bs * std::sinh(H);
    s.v << -h.a * std::sinh(H) * Hdot, bs * std::cosh(H) * Hdot;
    return s;
}

Eigen::Vector2d kepler_incoming_direction(const KeplerHyperbola& h) {
    return Eigen::Vector2d(1.0, std::sqrt(h.e * h.e - 1)) / h.e;
}

Eigen::Vector2d kepler_outgoing_direction(const KeplerHyperbola& h) {
    return Eigen::Vector2d(-1.0, std::sqrt(h.e * h.e - 1)) / h.e;
}

PhaseState kepler_two_body_state(const KeplerHyperbola& h, double t, double rotation) {
    const RelativeOrbitState s = kepler_relative_state(h, t);
    const Eigen::Rotation2Dd R(rotation);
    const Eigen::Vector2d r = R * s.r, v = R * s.v;
    const double M = h.m1 + h.m2;
    Vec q(4), p(4);
    q << (h.m2 / M) * r, -(h.m1 / M) * r;
    p << h.mu * v, -h.mu * v;
    return {p, q};
}

SystemSpec herbst_system(double alpha, double I) {
    SystemSpec s;
    s.n = 2;
    s.d = 1;
    s.masses = {2.0, 2.0};
    s.potential = PotentialModel::uniform(2, alpha, I);
    return s;
}

PhaseState herbst_embed(double q, double p) {
    Vec qq(2), pp(2);
    qq << -q / 2, q / 2;
    pp << -p, p;
    return {pp, qq};
}

double herbst_relative(const PhaseState& x) { return x.q(1) - x.q(0); }

HerbstProfiles herbst_profiles(double alpha, double I, double h, double q0, double t) {
    if (!(alpha > 0 && alpha < 1)) throw DomainError("herbst_profiles: needs 0 < alpha < 1");
    if (!(h > 0)) throw DomainError("herbst_profiles: needs positive energy");
    const double pp = std::sqrt(2 * h);
    const double c = I / ((1 - alpha) * std::pow(pp, 1 + alpha)) * std::pow(t, 1 - alpha);
    return {pp * t - c, pp * t - alpha * c + q0};
}

double central_configuration_defect(const SystemSpec& spec, const Vec& x) {
    const Vec g = velocity(spec, grad_potential(spec, x));
    const double xn = x.norm(), gn = g.norm();
    if (xn == 0 || gn == 0) return 0.0;
    return 1 - std::abs(x.dot(g)) / (xn * gn);
}

bool is_central_configuration(const SystemSpec& spec, const Vec& x, double tol) {
    return central_configuration_defect(spec, x) <= tol;
}

namespace {

// Component-wise least squares y_k = c + b log t + e log t / t + f / t; returns (c, b).
std::pair<Vec, Vec> log_fit(const std::vector<double>& t, const std::vector<Vec>& y) {
    const Eigen::Index N = static_cast<Eigen::Index>(t.size());
    const int cols = N >= 6 ? 4 : (N >= 3 ? 2 : 1);
    Mat A(N, cols), Y(N, y[0].size());
    for (Eigen::Index k = 0; k < N; ++k) {
        const double L = std::log(t[k]);
        A(k, 0) = 1;
        if (cols > 1) A(k, 1) = L;
        if (cols > 2) {
            A(k, 2) = L / t[k];
            A(k, 3) = 1 / t[k];
        }
        Y.row(k) = y[k].transpose();
    }
    Vec scale(cols);
    for (int c = 0; c < cols; ++c) {
        scale(c) = A.col(c).norm();
        A.col(c) /= scale(c);
    }
    const Mat C = A.colPivHouseholderQr().solve(Y);
    const Vec c0 = C.row(0).transpose() / scale(0);
    const Vec b = cols > 1 ? Vec(C.row(1).transpose() / scale(1)) : Vec::Zero(y[0].size());
    return {c0, b};
}

}  // namespace

AsymptoteFit fit_asymptote(const SystemSpec& spec, const std::vector<double>& t, const std::vector<PhaseState>& x,
                           double tol) {
    if (t.size() != x.size() || t.size() < 3) throw ValidationError("fit_asymptote: need >= 3 checkpoints");
    for (std::size_t k = 0; k < t.size(); ++k)
        if (!(t[k] > 0) || (k > 0 && !(t[k] > t[k - 1])))
            throw ValidationError("fit_asymptote: checkpoint times must be positive and increasing");
    AsymptoteFit fit;
    fit.t = t;
    std::vector<Vec> vs, dvs;
    for (const auto& s : x) {
        vs.push_back(velocity(spec, s.p));
        dvs.push_back(-velocity(spec, grad_potential(spec, s.q)));
    }
    fit.velocity = extrapolate(t, vs, dvs, tail_basis(spec.potential.alpha, 0.0), 0.0).value;
    const double vn = fit.velocity.norm();
    if (vn == 0) throw NotFreeError("fit_asymptote: zero asymptotic velocity");
    fit.direction = fit.velocity / vn;

    const std::size_t N = t.size();
    const std::size_t w = std::max<std::size_t>(std::min<std::size_t>(N, 6), N / 2);
    std::vector<double> tw(t.end() - w, t.end());
    std::vector<Vec> yw, zw;
    for (std::size_t k = N - w; k < N; ++k) {
        yw.push_back(project_perp(x[k].q, fit.direction));
        zw.push_back(x[k].q - fit.velocity * t[k]);
    }
    const auto [c, b] = log_fit(tw, yw);
    fit.offset = c;
    fit.log_vector = b;
    fit.log_coefficient = b.norm();
    fit.chazy_log = log_fit(tw, zw).second;
    for (std::size_t k = 0; k < N; ++k)
        fit.residual_trend.push_back((project_perp(x[k].q, fit.direction) - fit.offset).norm());
    fit.converges = fit.log_coefficient < tol && fit.residual_trend.back() < tol;
    return fit;
}

}  // namespace nbs
