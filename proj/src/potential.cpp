#include <cmath>

#include "nbscatter/system.hpp"

namespace nbs {

PotentialModel::Radial PotentialModel::radial(int i, int j, double r) const {
    const double I = coupling(i, j);
    switch (kind) {
        case Kind::homogeneous: {
            const double phi = I * std::pow(r, -alpha);
            return {phi, -alpha * phi / r, alpha * (alpha + 1) * phi / (r * r)};
        }
        case Kind::soft_power: {
            const double s = r * r + softening * softening;
            const double phi = I * std::pow(s, -alpha / 2);
            return {phi, -alpha * r * phi / s, -alpha * phi * (s - (alpha + 2) * r * r) / (s * s)};
        }
        case Kind::gaussian_bump: {
            const double w2 = width * width;
            const double phi = I * std::exp(-r * r / (2 * w2));
            return {phi, -r / w2 * phi, (r * r / (w2 * w2) - 1 / w2) * phi};
        }
    }
    return {0, 0, 0};
}

std::string PotentialModel::label() const {
    switch (kind) {
        case Kind::homogeneous: return "homogeneous";
        case Kind::soft_power: return "soft_power";
        case Kind::gaussian_bump: return "gaussian_bump";
    }
    return "?";
}

PotentialModel PotentialModel::homogeneous(double alpha, const Mat& coupling) {
    PotentialModel P;
    P.kind = Kind::homogeneous;
    P.alpha = alpha;
    P.coupling = coupling;
    return P;
}

PotentialModel PotentialModel::newtonian(const std::vector<double>& masses, double G) {
    const int n = static_cast<int>(masses.size());
    Mat I = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) I(i, j) = -G * masses[i] * masses[j];
    return homogeneous(1.0, I);
}

PotentialModel PotentialModel::uniform(int n, double alpha, double Ival) {
    Mat I = Mat::Constant(n, n, Ival);
    I.diagonal().setZero();
    return homogeneous(alpha, I);
}

PotentialModel PotentialModel::soft_power(double alpha, const Mat& coupling, double eps) {
    PotentialModel P = homogeneous(alpha, coupling);
    P.kind = Kind::soft_power;
    P.softening = eps;
    return P;
}

PotentialModel PotentialModel::gaussian_bump(double declared_alpha, const Mat& coupling, double sigma) {
    PotentialModel P = homogeneous(declared_alpha, coupling);
    P.kind = Kind::gaussian_bump;
    P.width = sigma;
    return P;
}

}  // namespace nbs
