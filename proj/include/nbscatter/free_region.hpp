#pragma once

#include <vector>

#include "nbscatter/flows.hpp"
#include "nbscatter/rng.hpp"

namespace nbs {

// Parameters of the finally-free region
//   (1) v_min^2 > C q_max / q_min^(alpha+1)
//   (2) <v_i - v_j, q_i - q_j> > (1 - delta) v_ij q_ij          for every pair
//   (3) (1 + 2 delta) q_kl / v_kl > q_ij / v_ij                 for every two pairs
struct FreeRegionParams {
    double delta = 0.2;
    double C = 0;
    double eps_margin = 0;  // membership requires every margin > eps_margin
    bool short_range = false;

    // delta_0 = min(alpha/(4+alpha), 1/5), delta = min(delta_0, alpha-1) if short range,
    // C = 16 d n |V|^(alpha,2) / delta.
    static FreeRegionParams defaults(const SystemSpec& spec);
    static FreeRegionParams defaults(const SystemSpec& spec, bool short_range);
};

// Normalised slacks: margin1 = 1 - C q_max / (q_min^(alpha+1) v_min^2),
// margin2 = min cos angle(v_ij, q_ij) - (1 - delta),
// margin3 = (1 + 2 delta) min(q/v) / max(q/v) - 1.
struct Membership {
    bool inside = false;
    double margin1 = 0, margin2 = 0, margin3 = 0;
    double min_margin() const;
};

Membership membership(const SystemSpec& spec, const PhaseState& x, const FreeRegionParams& prm);

struct EntryResult {
    bool found = false;
    double t = 0;
    PhaseState x;
    StopReason status = StopReason::completed;
};

// First time the forward orbit is in the region, located to ~1e-9 relative by
// bisection on the dense interpolant.
EntryResult entry_time(const SystemSpec& spec, const PhaseState& x0, const FreeRegionParams& prm, double t_max,
                       const IntegratorConfig& cfg);

struct PropagationReport {
    bool ok = true;
    double worst_lower = 0;  // min over samples of (dq - v t/2) / (v t)
    double worst_upper = 0;  // min over samples of (3 v t/2 - dq) / (v t)
    std::size_t checked = 0;
};

// Checks v_ij(0) t / 2 <= q_ij(t) - q_ij(0) <= 3 v_ij(0) t / 2 with relative slack.
PropagationReport propagation_check(const SystemSpec& spec, const PhaseState& x0, const std::vector<double>& t,
                                    const std::vector<PhaseState>& x, double slack);

struct SamplerOptions {
    double speed_lo = 0.5, speed_hi = 1.5;
    double min_pair_speed = 0.2;   // reject velocity sets with a slower pair
    double perturbation = 1.0;     // radius of the positional jitter
    int max_tries = 1000;
};

// Velocities on a shell (centre-of-mass frame), positions t* v + jitter with t*
// chosen so that the first inequality holds with a factor-2 margin.
PhaseState sample_free_state(const SystemSpec& spec, const FreeRegionParams& prm, CounterRng& rng,
                             const SamplerOptions& opt = {});

}  // namespace nbs
