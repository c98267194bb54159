#pragma once

#include <vector>

#include "nbscatter/flows.hpp"

namespace nbs {

// Planar two-body hyperbola for V = -k / |q1 - q2| (k > 0).
struct KeplerHyperbola {
    double m1 = 1, m2 = 1;
    double k = 1;
    double mu = 0.5;     // reduced mass
    double kappa = 2;    // k / mu
    double v_inf = 1;    // relative speed at infinity
    double b = 1;        // impact parameter
    double a = 0;        // kappa / v_inf^2
    double e = 0;        // eccentricity
    double n = 0;        // mean motion sqrt(kappa / a^3)

    double deflection() const;  // 2 asin(1/e)
};

KeplerHyperbola kepler_hyperbola(double m1, double m2, double k, double v_inf, double b);

// Solves e sinh H - H = M by Newton iteration.
double hyperbolic_anomaly(double e, double M, double tol = 1e-14);

struct RelativeOrbitState {
    Eigen::Vector2d r, v;  // q1 - q2 and its derivative
};

// Periapsis on +x at t = 0, motion counter-clockwise.
RelativeOrbitState kepler_relative_state(const KeplerHyperbola& h, double t);

// Asymptotic directions of the relative velocity (unit vectors), t -> -inf and t -> +inf.
Eigen::Vector2d kepler_incoming_direction(const KeplerHyperbola& h);
Eigen::Vector2d kepler_outgoing_direction(const KeplerHyperbola& h);

// Centre-of-mass two-body state (d = 2) at time t since periapsis, relative orbit rotated by `rotation`.
PhaseState kepler_two_body_state(const KeplerHyperbola& h, double t, double rotation = 0.0);

// One-dimensional H = p^2/2 + I q^-alpha, embedded as two bodies of mass 2 (reduced mass 1).
SystemSpec herbst_system(double alpha, double I);
PhaseState herbst_embed(double q, double p);
double herbst_relative(const PhaseState& x);  // q2 - q1

struct HerbstProfiles {
    double z1;  // p+ t - I t^(1-alpha) / ((1-alpha) p+^(1+alpha))
    double q1;  // p+ t - alpha I t^(1-alpha) / ((1-alpha) p+^(1+alpha)) + q0
};

HerbstProfiles herbst_profiles(double alpha, double I, double h, double q0, double t);

// x is a central configuration iff x is parallel to M^-1 grad V(x); returns 1 - |cos angle|.
double central_configuration_defect(const SystemSpec& spec, const Vec& x);
bool is_central_configuration(const SystemSpec& spec, const Vec& x, double tol = 1e-10);

struct AsymptoteFit {
    bool converges = false;
    Vec velocity;          // extrapolated M^-1 p_+
    Vec direction;         // unit velocity
    Vec offset;            // limit of the transverse component pi_perp q(t)
    std::vector<double> t;
    std::vector<double> residual_trend;  // |pi_perp q(t_k) - offset|
    double log_coefficient = 0;          // |b| in pi_perp q = c + b log t + ...
    Vec log_vector;                      // b
    Vec chazy_log;                       // L in q - v_+ t = c + L log t + ...
};

// Decides whether q(t) has a straight-line asymptote from late checkpoints (t_k > 0 increasing).
AsymptoteFit fit_asymptote(const SystemSpec& spec, const std::vector<double>& t, const std::vector<PhaseState>& x,
                           double tol = 1e-3);

}  // namespace nbs
