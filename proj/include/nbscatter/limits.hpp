#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nbscatter/system.hpp"

namespace nbs {

// Correction terms phi_j(T) for y(T) = y_inf + sum_j c_j phi_j(T) + ...
struct LimitBasis {
    std::vector<std::function<double(double)>> terms;
    std::vector<std::function<double(double)>> derivs;  // d phi_j / dT
    std::string name;
};

// Powers T^-e for e = k alpha + j - shift > 0 (k >= 1, j >= 0), sorted and de-duplicated.
LimitBasis power_ladder(double alpha, double shift, int count);
// log T / T, 1/T, log^2 T / T^2, log T / T^2, 1/T^2, ... (Coulomb-type tails)
LimitBasis log_ladder(int count);
// log ladder at alpha = 1, power ladder otherwise.
LimitBasis tail_basis(double alpha, double shift, int count = 5);

struct LimitEstimate {
    Vec value;
    double cauchy = 0;   // |E_N - E_{N-1}|_inf between the last two extrapolants
    double rate = 0;     // fitted decay exponent of |y_k - value|
    bool converged = false;
    std::vector<Vec> history;  // extrapolant after each new point
};

// Least-squares extrapolation of y(T_k) -> y_inf over a sliding window of the
// most recent points. T must be increasing in |T|.
LimitEstimate extrapolate(const std::vector<double>& T, const std::vector<Vec>& y, const LimitBasis& basis,
                          double tol, int window = 8);
// Same, also matching the sampled derivatives dy/dT (rows weighted by |T|).
LimitEstimate extrapolate(const std::vector<double>& T, const std::vector<Vec>& y, const std::vector<Vec>& dy,
                          const LimitBasis& basis, double tol, int window = 4);

struct LineFit {
    double slope = 0, intercept = 0;
    double slope_se = 0;    // standard error
    double halfwidth = 0;   // 95% half-width (Student t)
    double r2 = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Slope of log|y| against log|t|.
LineFit fit_loglog(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace nbs
