#pragma once

#include <functional>
#include <vector>

#include "nbscatter/flows.hpp"
#include "nbscatter/free_region.hpp"
#include "nbscatter/limits.hpp"

namespace nbs {

// Comparison dynamics for wave operators: free flow (short range) or Dollard (long range).
enum class Comparison { free, dollard };

const char* to_string(Comparison c);
Comparison default_comparison(const SystemSpec& spec);

struct TransformConfig {
    IntegratorConfig integrator = [] {
        IntegratorConfig c;
        c.rel_tol = 1e-13;
        c.abs_tol = 1e-15;
        c.store_steps = false;
        return c;
    }();
    double T_first = 64;   // first dyadic checkpoint
    double T_max = 1e5;    // last checkpoint is the largest T_first 2^k <= T_max
    double tol = 1e-7;     // Cauchy tolerance on successive extrapolants
    int window = 4;        // checkpoints per fit when time derivatives are matched too
    int value_window = 8;  // checkpoints per fit from values alone
    int basis_terms = 5;
    bool use_derivatives = true;
    bool require_convergence = false;  // throw NonConvergenceError instead of flagging
};

// Asymptotic datum (p_pm, r_pm) with convergence diagnostics.
struct ScatteringDatum {
    Vec p;
    Vec r;  // empty for asymptotic_velocity
    int direction = 1;
    double residual = 0;  // Cauchy difference of the last two extrapolants
    double rate = 0;      // fitted decay exponent of the finite-T values
    bool converged = false;
    std::vector<double> T;
    std::vector<Vec> samples;  // finite-T values, packed (p, r)
    std::vector<Vec> derivatives;  // d samples / dT where available (empty for time limits)
    // asymptotic_velocity only
    bool entered = false;      // some checkpoint lies in the finally-free region
    double entry_checkpoint = 0;
    double tail_bound = 0;     // 2 |V|^(alpha,1) / (alpha v_min q_min^alpha) at that checkpoint
    bool dispersing = false;

    PhaseState state() const { return {p, r}; }
};

// p_pm(x0) = lim_{t -> +-inf} p(t), by dyadic checkpoints and extrapolation.
ScatteringDatum asymptotic_velocity(const SystemSpec& spec, const PhaseState& x0, int direction,
                                    const TransformConfig& cfg = {});

// Omega_pm^-1 x0 = lim_{T -> +-inf} Phi^comp_{0,T} Phi_T x0.
ScatteringDatum inverse_moller(const SystemSpec& spec, const PhaseState& x0, int direction, Comparison comp,
                               const TransformConfig& cfg = {});
// Dollard comparison; DomainError unless alpha > 1/2.
ScatteringDatum inverse_moller_dollard(const SystemSpec& spec, const PhaseState& x0, int direction,
                                       const TransformConfig& cfg = {});

// Omega_pm X = lim_{T -> +-inf} Phi_{-T} Phi^comp_{T,0} X.
ScatteringDatum moller_time_limit(const SystemSpec& spec, const PhaseState& X, int direction, Comparison comp,
                                  const TransformConfig& cfg = {});

struct FixedPointConfig {
    double T_max = 1e6;       // grid end; the tail beyond it is integrated with r frozen
    double growth = 1.0 / 64; // node spacing h(t) = growth (t + tau0)
    double tol = 1e-10;       // sup-norm change between iterates
    int max_iter = 200;
    bool require_free_region = true;
};

struct FixedPointResult {
    PhaseState x;               // Omega_+(X0)
    bool converged = false;
    int iterations = 0;
    std::vector<double> sup_change;  // |r_{m+1} - r_m|_sup per iteration
    double max_ratio = 0;       // largest successive contraction ratio observed
    double r_sup = 0;
    double tail_contribution = 0;
    std::vector<double> grid;
    std::vector<Vec> r, rdot;
};

// Short-range Moller transform by Picard iteration of
//   r(t) = -M^-1 int_t^inf int_s^inf grad V(Q0 + M^-1 P0 tau + r(tau)) dtau ds.
FixedPointResult moller_fixed_point(const SystemSpec& spec, const PhaseState& X0, const FixedPointConfig& cfg = {});

// pi_perp w = w - v <w, v> / |v|^2
Vec project_perp(const Vec& w, const Vec& v);

struct OffsetResult {
    Vec offset;       // pi_perp of the limit, relative to the reference asymptotic velocity
    Vec limit;        // lim q(t) - q_ref(t)
    double orthogonality = 0;  // |<offset, v>| / (|offset| |v|)
    double residual = 0;
    bool converged = false;
};

OffsetResult asymptotic_offset(const SystemSpec& spec, const PhaseState& x, const PhaseState& x_ref,
                               const TransformConfig& cfg = {});

struct SyncResult {
    double exponent = 0, halfwidth = 0;  // fitted log-log slope of |p2 - p1|
    Vec q_limit;
    double q_cauchy = 0;
    bool converged = false;
    std::vector<double> t, dp;
};

// Orbits with equal p_+: |p2(t) - p1(t)| decay exponent over [t_lo, t_hi], limit of q2 - q1.
SyncResult pair_synchronization(const SystemSpec& spec, const PhaseState& x1, const PhaseState& x2,
                                const TransformConfig& cfg = {}, double t_lo = 0, double t_hi = 0);

struct ScatterResult {
    PhaseState x0;           // Omega_-(X_in)
    ScatteringDatum incoming;
    ScatteringDatum outgoing;  // Omega_+^-1 x0
    Comparison comparison = Comparison::dollard;
};

// S = Omega_+^-1 Omega_-; the incoming datum is taken at comparison time 0.
ScatterResult scattering_map(const SystemSpec& spec, const PhaseState& X_in, const TransformConfig& cfg = {});

// Angle between the relative velocities of particles 0 and 1.
double deflection_angle(const SystemSpec& spec, const Vec& p_in, const Vec& p_out);

struct SymplecticReport {
    double residual = 0;  // max |J^T S J - S|
    Mat J;
};

// Central-difference Jacobian in packed (q, p) coordinates.
SymplecticReport symplectic_residual(const std::function<PhaseState(const PhaseState&)>& map, const PhaseState& x,
                                     double h);

}  // namespace nbs
