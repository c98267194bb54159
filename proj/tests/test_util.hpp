#pragma once

#include <cmath>
#include <vector>

#include "nbscatter/rng.hpp"
#include "nbscatter/system.hpp"

namespace nbs::testing {

inline SystemSpec make_spec(int n, int d, std::vector<double> masses, PotentialModel pot) {
    SystemSpec s;
    s.n = n;
    s.d = d;
    s.masses = std::move(masses);
    s.potential = std::move(pot);
    return s;
}

inline SystemSpec pair_spec(int d, double alpha, double I, double m1 = 1, double m2 = 1) {
    return make_spec(2, d, {m1, m2}, PotentialModel::uniform(2, alpha, I));
}

inline Mat random_coupling(CounterRng& rng, int n) {
    Mat I = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) I(i, j) = I(j, i) = rng.uniform(-2, 2);
    return I;
}

// One of the four potential families with random parameters.
inline SystemSpec random_spec(CounterRng& rng, int n, int d, int kind) {
    std::vector<double> m;
    for (int i = 0; i < n; ++i) m.push_back(rng.uniform(0.5, 2.0));
    const double alpha = rng.uniform(0.6, 2.5);
    const Mat I = random_coupling(rng, n);
    switch (kind % 4) {
        case 0: return make_spec(n, d, m, PotentialModel::homogeneous(alpha, I));
        case 1: return make_spec(n, d, m, PotentialModel::newtonian(m, rng.uniform(0.5, 2)));
        case 2: return make_spec(n, d, m, PotentialModel::soft_power(alpha, I, rng.uniform(0.1, 1)));
        default: return make_spec(n, d, m, PotentialModel::gaussian_bump(alpha, I, rng.uniform(0.5, 2)));
    }
}

// Positions in a box of side `box` with all pair distances at least `sep`.
inline Vec random_positions(CounterRng& rng, const SystemSpec& s, double box = 6, double sep = 0.5) {
    for (;;) {
        Vec q(s.dim());
        for (int k = 0; k < s.dim(); ++k) q(k) = rng.uniform(-box / 2, box / 2);
        bool ok = true;
        for (int i = 0; i < s.n && ok; ++i)
            for (int j = i + 1; j < s.n && ok; ++j) ok = (q.segment(i * s.d, s.d) - q.segment(j * s.d, s.d)).norm() >= sep;
        if (ok) return q;
    }
}

inline Vec random_vector(CounterRng& rng, int n, double scale = 1) {
    Vec v(n);
    for (int k = 0; k < n; ++k) v(k) = scale * rng.normal();
    return v;
}

inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace nbs::testing
