#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "nbscatter/system.hpp"

namespace nbs {

enum class IntegratorMethod { dop853, symplectic6 };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::dop853;
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
    double max_step = std::numeric_limits<double>::infinity();
    double first_step = 0;      // 0: automatic
    double fixed_step = 1e-2;   // symplectic6 only
    double collision_radius = 0;  // 0: spec value, else 1e-6 * initial q_min
    bool dense = false;         // keep the order-7 interpolant of every step
    bool store_steps = true;
    std::size_t max_steps = 20'000'000;
};

enum class StopReason { completed, collision, max_steps, step_underflow, observer };

const char* to_string(StopReason r);

// One DOP853 step [t0, t1] with its continuous extension.
struct DenseSegment {
    double t0 = 0, t1 = 0;
    Vec y0;
    Mat F;  // 7 coefficient rows, packed (q,p) columns
    Vec eval(double t) const;
};

struct Trajectory {
    std::vector<double> t;          // accepted step ends, starting with t0
    std::vector<PhaseState> x;
    std::vector<double> checkpoint_t;  // requested checkpoints that were reached
    std::vector<PhaseState> checkpoint_x;
    std::vector<DenseSegment> dense;
    StopReason status = StopReason::completed;
    double t_end = 0;
    PhaseState x_end;
    double collision_radius = 0;
    std::size_t steps = 0, rejected = 0, evaluations = 0;

    bool completed() const { return status == StopReason::completed; }
    PhaseState dense_eval(double t) const;
};

// Called after every accepted step; return false to stop integration.
using StepObserver = std::function<bool(double, const PhaseState&)>;

// Integrate the n-body flow from t0 to t1 (either direction). Steps are clipped
// so that every checkpoint strictly between t0 and t1 (and t1 itself) is hit exactly.
Trajectory integrate(const SystemSpec& spec, const PhaseState& x0, double t0, double t1,
                     const IntegratorConfig& cfg, std::vector<double> checkpoints = {},
                     const StepObserver& observer = {});

// Phi_t(x0); throws NotFreeError on collision and NonConvergenceError on step failure.
PhaseState flow(const SystemSpec& spec, const PhaseState& x0, double t, const IntegratorConfig& cfg);

// Phi^0_t(p, q) = (p, q + t M^-1 p)
PhaseState free_flow(const SystemSpec& spec, const PhaseState& x, double t);

// f_alpha(t) = int_0^t <s>^-alpha ds
double f_alpha(double alpha, double t);
double f_alpha_series(double alpha, double t);      // |t| < 1
double f_alpha_quadrature(double alpha, double t);  // any t

// int_q^inf <s>^(-alpha-1) ds by quadrature (q >= 0)
double smooth_abs_tail(double alpha, double q);

// W(t;p) = int_0^t grad_p V(<s> M^-1 p) ds
Vec dollard_W(const SystemSpec& spec, double t, const Vec& p);
Vec dollard_W_quadrature(const SystemSpec& spec, double t, const Vec& p);
// d/dt W(t;p) = <t> M^-1 grad V(<t> M^-1 p)
Vec dollard_W_dt(const SystemSpec& spec, double t, const Vec& p);
// D_p W(t;p) w
Vec dollard_W_dp(const SystemSpec& spec, double t, const Vec& p, const Vec& w);

// Phi^D_{t,s}(p, q) = (p, q + (t - s) v + W(t;p) - W(s;p))
PhaseState dollard_flow(const SystemSpec& spec, double t, double s, const PhaseState& x);

std::vector<double> dyadic_times(double t0, double t_max);

}  // namespace nbs
