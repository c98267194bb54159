#include "nbscatter/limits.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

namespace nbs {

LimitBasis power_ladder(double alpha, double shift, int count) {
    std::vector<double> ex;
    for (int k = 1; k <= 8; ++k)
        for (int j = 0; j <= 6; ++j) {
            const double e = k * alpha + j - shift;
            if (e > 1e-9) ex.push_back(e);
        }
    std::sort(ex.begin(), ex.end());
    std::vector<double> uniq;
    for (double e : ex)
        if (uniq.empty() || e - uniq.back() > 1e-6) uniq.push_back(e);
    if (static_cast<int>(uniq.size()) > count) uniq.resize(count);
    LimitBasis b;
    b.name = "power";
    for (double e : uniq) {
        b.terms.push_back([e](double T) { return std::pow(std::abs(T), -e); });
        b.derivs.push_back([e](double T) { return -std::copysign(e, T) * std::pow(std::abs(T), -e - 1); });
        b.name += " " + std::to_string(e);
    }
    return b;
}

LimitBasis log_ladder(int count) {
    LimitBasis b;
    b.name = "log";
    for (int order = 1; static_cast<int>(b.terms.size()) < count; ++order)
        for (int lp = order; lp >= 0 && static_cast<int>(b.terms.size()) < count; --lp)
        {
            b.terms.push_back([order, lp](double T) {
                const double a = std::abs(T);
                return std::pow(std::log(a), lp) / std::pow(a, order);
            });
            b.derivs.push_back([order, lp](double T) {
                const double a = std::abs(T), L = std::log(a);
                const double g = (lp > 0 ? lp * std::pow(L, lp - 1) : 0.0) - order * std::pow(L, lp);
                return (T < 0 ? -g : g) / std::pow(a, order + 1);
            });
        }
    return b;
}

LimitBasis tail_basis(double alpha, double shift, int count) {
    if (std::abs(alpha - 1.0) < 1e-12) return log_ladder(count);
    return power_ladder(alpha, shift, count);
}

namespace {

// Rows: y(T) = c0 + sum c_j phi_j(T), and optionally |T| y'(T) = sum c_j |T| phi_j'(T).
Vec fit_constant(const std::vector<double>& T, const std::vector<Vec>& y, const std::vector<Vec>* dy,
                 std::size_t lo, std::size_t hi, const LimitBasis& basis) {
    const Eigen::Index w = static_cast<Eigen::Index>(hi - lo);
    const int per = dy ? 2 : 1;
    const int avail = static_cast<int>(per * w) - 2;
    const int nterms = std::max<int>(0, std::min<int>(static_cast<int>(basis.terms.size()), avail));
    if (nterms == 0 || w < 2) return y[hi - 1];
    const Eigen::Index m = y[lo].size();
    Mat A = Mat::Zero(per * w, nterms + 1);
    Mat Y(per * w, m);
    for (Eigen::Index r = 0; r < w; ++r) {
        const double t = T[lo + r];
        A(r, 0) = 1;
        for (int c = 0; c < nterms; ++c) A(r, c + 1) = basis.terms[c](t);
        Y.row(r) = y[lo + r].transpose();
        if (dy) {
            const double a = std::abs(t);
            for (int c = 0; c < nterms; ++c) A(w + r, c + 1) = a * basis.derivs[c](t);
            Y.row(w + r) = a * (*dy)[lo + r].transpose();
        }
    }
    Vec colscale(nterms + 1);
    for (int c = 0; c <= nterms; ++c) {
        colscale(c) = A.col(c).norm();
        if (colscale(c) > 0) A.col(c) /= colscale(c);
    }
    const Mat C = A.colPivHouseholderQr().solve(Y);
    return C.row(0).transpose() / colscale(0);
}

LimitEstimate extrapolate_impl(const std::vector<double>& T, const std::vector<Vec>& y, const std::vector<Vec>* dy,
                               const LimitBasis& basis, double tol, int window) {
    if (T.size() != y.size() || T.empty()) throw ValidationError("extrapolate: need matching, non-empty samples");
    if (dy && dy->size() != y.size()) throw ValidationError("extrapolate: derivative samples do not match");
    if (dy && basis.derivs.size() != basis.terms.size())
        throw ValidationError("extrapolate: basis has no derivatives");
    LimitEstimate est;
    const std::size_t N = T.size();
    for (std::size_t e = 1; e <= N; ++e) {
        const std::size_t lo = e > static_cast<std::size_t>(window) ? e - window : 0;
        est.history.push_back(fit_constant(T, y, dy, lo, e, basis));
    }
    est.value = est.history.back();
    est.cauchy = N >= 2 ? (est.history[N - 1] - est.history[N - 2]).cwiseAbs().maxCoeff()
                        : std::numeric_limits<double>::infinity();
    est.converged = est.cauchy < tol;

    std::vector<double> lt, lr;
    for (std::size_t k = N > static_cast<std::size_t>(window) ? N - window : 0; k + 1 < N; ++k) {
        const double r = (y[k] - est.value).cwiseAbs().maxCoeff();
        if (r > 0) {
            lt.push_back(std::log(std::abs(T[k])));
            lr.push_back(std::log(r));
        }
    }
    if (lt.size() >= 2) est.rate = -fit_line(lt, lr).slope;
    return est;
}

}  // namespace

LimitEstimate extrapolate(const std::vector<double>& T, const std::vector<Vec>& y, const LimitBasis& basis, double tol,
                          int window) {
    return extrapolate_impl(T, y, nullptr, basis, tol, window);
}

LimitEstimate extrapolate(const std::vector<double>& T, const std::vector<Vec>& y, const std::vector<Vec>& dy,
                          const LimitBasis& basis, double tol, int window) {
    return extrapolate_impl(T, y, &dy, basis, tol, window);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ValidationError("fit_line: need at least two paired samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0;  // summed directly; syy - slope * sxy cancels badly for near-exact fits
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ssr += r * r;
    }
    f.r2 = syy > 0 ? 1 - ssr / syy : 1;
    if (n > 2) {
        f.slope_se = std::sqrt(ssr / (n - 2) / sxx);
        boost::math::students_t dist(static_cast<double>(n - 2));
        f.halfwidth = boost::math::quantile(boost::math::complement(dist, 0.025)) * f.slope_se;
    }
    return f;
}

LineFit fit_loglog(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (y[i] > 0 && t[i] != 0) {
            lx.push_back(std::log(std::abs(t[i])));
            ly.push_back(std::log(y[i]));
        }
    return fit_line(lx, ly);
}

}  // namespace nbs
