#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "nbscatter/flows.hpp"

namespace nbs {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

constexpr double kQuadTol = 1e-12;

// Integrate f over [a, b] (0 <= a < b), splitting dyadically above 1 so that
// each panel sees a slowly varying integrand.
template <class F>
double panel_integral(F&& f, double a, double b) {
    double total = 0;
    double lo = a;
    while (lo < b) {
        const double hi = std::min(b, std::max(2 * lo, lo + 1.0));
        total += GK::integrate(f, lo, hi, 15, kQuadTol * 1e-2);
        lo = hi;
    }
    return total;
}

}  // namespace

double f_alpha_series(double alpha, double t) {
    if (!(std::abs(t) < 1)) throw DomainError("f_alpha_series: requires |t| < 1");
    // t * 2F1(1/2, alpha/2; 3/2; -t^2)
    const double z = -t * t;
    double term = 1, sum = 1;
    for (int n = 0; n < 2'000'000; ++n) {
        term *= (n + 0.5) * (n + alpha / 2) / ((n + 1.5) * (n + 1)) * z;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return t * sum;
}

double f_alpha_quadrature(double alpha, double t) {
    const double a = std::abs(t);
    const double v = panel_integral([alpha](double s) { return std::pow(s * s + 1, -alpha / 2); }, 0.0, a);
    return t < 0 ? -v : v;
}

double f_alpha(double alpha, double t) {
    if (alpha == 1.0) return std::asinh(t);
    const double a = std::abs(t);
    if (a < 1) return f_alpha_series(alpha, t);
    const double head = f_alpha_series(alpha, 0.5);
    const double v =
        head + panel_integral([alpha](double s) { return std::pow(s * s + 1, -alpha / 2); }, 0.5, a);
    return t < 0 ? -v : v;
}

double smooth_abs_tail(double alpha, double q) {
    if (!(alpha > 0) || !(q >= 0)) throw DomainError("smooth_abs_tail: needs alpha > 0 and q >= 0");
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([alpha, q](double u) { return std::pow(smooth_abs(q + u), -alpha - 1); }, 0.0,
                        std::numeric_limits<double>::infinity(), 1e-13);
}

Vec dollard_W(const SystemSpec& spec, double t, const Vec& p) {
    if (spec.potential.smooth()) return dollard_W_quadrature(spec, t, p);
    // Homogeneity: grad V(<s> v) = <s>^{-alpha-1} grad V(v).
    const Vec v = velocity(spec, p);
    return f_alpha(spec.potential.alpha, t) * velocity(spec, grad_potential(spec, v));
}

Vec dollard_W_quadrature(const SystemSpec& spec, double t, const Vec& p) {
    const Vec v = velocity(spec, p);
    const Eigen::Index m = p.size();
    Vec W(m);
    const double a = std::abs(t);
    for (Eigen::Index c = 0; c < m; ++c) {
        auto integrand = [&](double s) {
            const double w = smooth_abs(s);
            return w * velocity(spec, grad_potential(spec, w * v))(c);
        };
        const double val = panel_integral(integrand, 0.0, a);
        W(c) = t < 0 ? -val : val;
    }
    return W;
}

Vec dollard_W_dt(const SystemSpec& spec, double t, const Vec& p) {
    const double w = smooth_abs(t);
    return w * velocity(spec, grad_potential(spec, w * velocity(spec, p)));
}

Vec dollard_W_dp(const SystemSpec& spec, double t, const Vec& p, const Vec& w) {
    const Vec v = velocity(spec, p);
    const Vec u = velocity(spec, w);
    if (!spec.potential.smooth())
        return f_alpha(spec.potential.alpha, t) * velocity(spec, hess_potential_apply(spec, v, u));
    const Eigen::Index m = p.size();
    Vec D(m);
    const double a = std::abs(t);
    for (Eigen::Index c = 0; c < m; ++c) {
        auto integrand = [&](double s) {
            const double x = smooth_abs(s);
            return x * x * velocity(spec, hess_potential_apply(spec, x * v, u))(c);
        };
        const double val = panel_integral(integrand, 0.0, a);
        D(c) = t < 0 ? -val : val;
    }
    return D;
}

PhaseState dollard_flow(const SystemSpec& spec, double t, double s, const PhaseState& x) {
    const Vec v = velocity(spec, x.p);
    return {x.p, x.q + (t - s) * v + dollard_W(spec, t, x.p) - dollard_W(spec, s, x.p)};
}

}  // namespace nbs
