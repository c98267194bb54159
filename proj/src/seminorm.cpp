#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "nbscatter/system.hpp"

namespace nbs {

namespace {

// Unit directions used for suprema over the sphere. Always contains the
// coordinate axes and the pairwise diagonals, where radial kernels attain
// the extrema of first and second partials.
std::vector<Vec> sphere_directions(int d, int count) {
    std::vector<Vec> dirs;
    for (int a = 0; a < d; ++a) {
        Vec e = Vec::Zero(d);
        e(a) = 1;
        dirs.push_back(e);
        for (int b = a + 1; b < d; ++b) {
            Vec f = Vec::Zero(d);
            f(a) = f(b) = std::sqrt(0.5);
            dirs.push_back(f);
            f(b) = -f(b);
            dirs.push_back(f);
        }
    }
    if (d == 1) {
        dirs.push_back(-dirs[0]);
        return dirs;
    }
    if (d == 2) {
        for (int k = 0; k < count; ++k) {
            const double th = 2 * std::numbers::pi * k / count;
            Vec u(2);
            u << std::cos(th), std::sin(th);
            dirs.push_back(u);
        }
    } else if (d == 3) {
        const double golden = std::numbers::pi * (3 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1 - 2 * (k + 0.5) / count;
            const double rr = std::sqrt(1 - z * z);
            Vec u(3);
            u << rr * std::cos(golden * k), rr * std::sin(golden * k), z;
            dirs.push_back(u);
        }
    } else {
        std::mt19937_64 gen(0x5eed + d);
        std::normal_distribution<double> N;
        for (int k = 0; k < count; ++k) {
            Vec u(d);
            for (int a = 0; a < d; ++a) u(a) = N(gen);
            dirs.push_back(u.normalized());
        }
    }
    return dirs;
}

// Partial d^gamma of a radial function given phi', phi'' (|gamma| <= 2).
double radial_partial(const PotentialModel::Radial& rad, double r, const Vec& u, const std::vector<int>& gamma) {
    std::vector<int> idx;
    for (int a = 0; a < static_cast<int>(gamma.size()); ++a)
        for (int c = 0; c < gamma[a]; ++c) idx.push_back(a);
    if (idx.size() == 1) return rad.dphi * u(idx[0]);
    const int a = idx[0], b = idx[1];
    return rad.ddphi * u(a) * u(b) + rad.dphi / r * ((a == b ? 1.0 : 0.0) - u(a) * u(b));
}

}  // namespace

std::vector<std::vector<int>> multi_indices(int d, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(d, 0);
    auto rec = [&](auto&& self, int pos, int left) -> void {
        if (pos == d - 1) {
            cur[pos] = left;
            out.push_back(cur);
            return;
        }
        for (int c = left; c >= 0; --c) {
            cur[pos] = c;
            self(self, pos + 1, left - c);
        }
    };
    rec(rec, 0, k);
    return out;
}

double homogeneous_partial(double alpha, const std::vector<int>& gamma, const Vec& x) {
    // Terms c * x^beta * phi^(m)(|x|^2) with phi(s) = s^(-alpha/2).
    using Key = std::pair<std::vector<int>, int>;
    const int d = static_cast<int>(gamma.size());
    std::map<Key, double> terms{{{std::vector<int>(d, 0), 0}, 1.0}};
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < gamma[a]; ++c) {
            std::map<Key, double> next;
            for (const auto& [key, coef] : terms) {
                auto beta = key.first;
                const int m = key.second;
                if (beta[a] > 0) {
                    auto b2 = beta;
                    b2[a] -= 1;
                    next[{b2, m}] += coef * beta[a];
                }
                beta[a] += 1;
                next[{beta, m + 1}] += 2 * coef;
            }
            terms = std::move(next);
        }
    const double s = x.squaredNorm();
    double total = 0;
    for (const auto& [key, coef] : terms) {
        double phim = 1;
        for (int l = 0; l < key.second; ++l) phim *= (-alpha / 2 - l);
        phim *= std::pow(s, -alpha / 2 - key.second);
        double mono = 1;
        for (int a = 0; a < d; ++a) mono *= std::pow(x(a), key.first[a]);
        total += coef * mono * phim;
    }
    return total;
}

SeminormResult seminorm(const SystemSpec& s, int k) {
    if (k < 1) throw ValidationError("seminorm: order k must be >= 1");
    const auto& P = s.potential;
    const double a = P.alpha;
    const int d = s.d;
    double pair_sum = 0;  // sum over pairs of |I_ij| (homogeneous kernels scale linearly)
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) pair_sum += std::abs(P.coupling(i, j));

    if (!P.smooth()) {
        if (k == 1) return {s.inv_mass_norm() * pair_sum * d * a, SeminormMethod::analytic, 0};
        if (k == 2) {
            const double per = d * a * (a + 1) + 0.5 * d * (d - 1) * a * (a + 2) / 2;
            return {s.inv_mass_norm() * pair_sum * per, SeminormMethod::analytic, 0};
        }
        const auto dirs = sphere_directions(d, d <= 2 ? 720 : 4000);
        double per = 0;
        for (const auto& g : multi_indices(d, k)) {
            double sup = 0;
            for (const auto& u : dirs) sup = std::max(sup, std::abs(homogeneous_partial(a, g, u)));
            per += sup;
        }
        return {s.inv_mass_norm() * pair_sum * per, SeminormMethod::sampled, 0.05};
    }

    if (k > P.max_order())
        throw SeminormError("seminorm: smooth pair profiles provide derivatives up to order 2 only");
    const auto dirs = sphere_directions(d, 128);
    const auto gammas = multi_indices(d, k);
    const int nr = 64;
    double total = 0;
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) {
            if (P.coupling(i, j) == 0) continue;
            std::vector<double> sup(gammas.size(), 0.0);
            std::vector<double> at_radius(nr, 0.0);
            for (int ir = 0; ir < nr; ++ir) {
                const double r = std::pow(10.0, -2 + 6.0 * ir / (nr - 1));
                const auto rad = P.radial(i, j, r);
                const double w = std::pow(r, a + k);
                for (std::size_t g = 0; g < gammas.size(); ++g)
                    for (const auto& u : dirs) {
                        const double val = w * std::abs(radial_partial(rad, r, u, gammas[g]));
                        sup[g] = std::max(sup[g], val);
                        at_radius[ir] = std::max(at_radius[ir], val);
                    }
            }
            const double outer = at_radius[nr - 1], inner = at_radius[nr - 2];
            if (outer > 0 && outer > (1 + 1e-3) * inner &&
                outer >= *std::max_element(at_radius.begin(), at_radius.end()))
                throw SeminormError("seminorm: weighted derivative grows at the largest radius; potential is not (" +
                                    std::to_string(a) + "," + std::to_string(k) + ") at infinity");
            for (double v : sup) total += v;
        }
    return {s.inv_mass_norm() * total, SeminormMethod::sampled, 0.05};
}

double gradient_seminorm(const SystemSpec& s) {
    const auto& P = s.potential;
    double best = 0;
    for (int i = 0; i < s.n; ++i)
        for (int j = i + 1; j < s.n; ++j) {
            if (!P.smooth()) {
                best = std::max(best, P.alpha * std::abs(P.coupling(i, j)));
                continue;
            }
            for (int ir = 0; ir < 64; ++ir) {
                const double r = std::pow(10.0, -2 + 6.0 * ir / 63);
                best = std::max(best, std::pow(r, P.alpha + 1) * std::abs(P.radial(i, j, r).dphi));
            }
        }
    return s.inv_mass_norm() * best;
}

}  // namespace nbs
