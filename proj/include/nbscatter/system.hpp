#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nbscatter/errors.hpp"

namespace nbs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Pair interaction model. Every pair potential is radial, V_ij(Q) = phi_ij(|Q|).
//   homogeneous:     phi = I_ij r^-alpha
//   soft_power:      phi = I_ij (r^2 + eps^2)^(-alpha/2)
//   gaussian_bump:   phi = I_ij exp(-r^2 / (2 sigma^2)); alpha is the declared decay order
// The last two are the smooth, tabulated-on-demand family.
struct PotentialModel {
    enum class Kind { homogeneous, soft_power, gaussian_bump };

    Kind kind = Kind::homogeneous;
    double alpha = 1.0;
    Mat coupling;           // symmetric n x n, diagonal ignored
    double softening = 0.0; // soft_power
    double width = 1.0;     // gaussian_bump

    bool smooth() const { return kind != Kind::homogeneous; }
    // Highest k for which the (alpha,k) seminorm can be evaluated.
    int max_order() const { return smooth() ? 2 : 16; }
    double coupling_of(int i, int j) const { return coupling(i, j); }

    struct Radial {
        double phi, dphi, ddphi;
    };
    Radial radial(int i, int j, double r) const;
    std::string label() const;

    static PotentialModel homogeneous(double alpha, const Mat& coupling);
    static PotentialModel newtonian(const std::vector<double>& masses, double G = 1.0);
    static PotentialModel uniform(int n, double alpha, double I);
    static PotentialModel soft_power(double alpha, const Mat& coupling, double eps);
    static PotentialModel gaussian_bump(double declared_alpha, const Mat& coupling, double sigma);
};

struct SystemSpec {
    int n = 2;
    int d = 3;
    std::vector<double> masses;
    PotentialModel potential;
    double collision_radius = 0.0;  // 0: derived from the initial state

    int dim() const { return n * d; }
    double inv_mass_norm() const;   // |M^-1| = 1/min m
    void validate() const;          // throws ValidationError
};

// (p, q) in R^{dn} x R^{dn}, particle-major layout: index i*d + a.
struct PhaseState {
    Vec p;
    Vec q;

    PhaseState() = default;
    PhaseState(Vec p_, Vec q_) : p(std::move(p_)), q(std::move(q_)) {}

    // Packed as (q, p) for the integrators.
    Vec packed() const;
    static PhaseState unpack(const Vec& y);
};

struct PairStats {
    double q_min = 0, q_max = 0;
    double v_min = 0, v_max = 0;
    std::vector<double> q_ij;  // pair order (0,1),(0,2),...,(1,2),...
    std::vector<double> v_ij;
    std::vector<double> radial;  // <v_i - v_j, q_i - q_j>
};

int pair_count(int n);

Vec velocity(const SystemSpec& s, const Vec& p);  // M^-1 p
Vec momentum(const SystemSpec& s, const Vec& v);  // M v
double kinetic_energy(const SystemSpec& s, const Vec& p);
double potential_energy(const SystemSpec& s, const Vec& q);
double hamiltonian(const SystemSpec& s, const PhaseState& x);
Vec grad_potential(const SystemSpec& s, const Vec& q);
Vec hess_potential_apply(const SystemSpec& s, const Vec& q, const Vec& w);
Vec total_momentum(const SystemSpec& s, const Vec& p);

PairStats pair_stats(const SystemSpec& s, const PhaseState& x);
double q_min(const SystemSpec& s, const Vec& q);

// X_ij(q) = sum_{k!=i} grad V_ik / m_i - sum_{k!=j} grad V_jk / m_j
Vec relative_acceleration(const SystemSpec& s, const Vec& q, int i, int j);

// <t> = sqrt(t^2 + 1)
inline double smooth_abs(double t) { return std::sqrt(t * t + 1.0); }

enum class SeminormMethod { analytic, sampled };

struct SeminormResult {
    double value = 0;
    SeminormMethod method = SeminormMethod::analytic;
    double slack = 0;  // relative uncertainty attached to sampled values
};

// |V|^(alpha,k) = |M^-1| sum_{i<j} sum_{|gamma|=k} sup |q|^{alpha+k} |d^gamma V_ij(q)|
SeminormResult seminorm(const SystemSpec& s, int k);
// |V|^(alpha) = |M^-1| max_{i<j} sup |q|^{alpha+1} |grad V_ij(q)|
double gradient_seminorm(const SystemSpec& s);

// Partial derivative d^gamma of |x|^-alpha at x (homogeneous kernel, unit coupling).
double homogeneous_partial(double alpha, const std::vector<int>& gamma, const Vec& x);
// Enumerate multi-indices of dimension d and order k.
std::vector<std::vector<int>> multi_indices(int d, int k);

}  // namespace nbs
