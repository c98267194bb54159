#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nbscatter/flows.hpp"

namespace nbs {

// One measured quantity compared against its threshold.
struct Measurement {
    std::string name;
    double value = 0;
    std::string relation;  // "<", "<=", ">", ">=", "in"
    double lo = 0, hi = 0; // threshold; for "in" the closed interval [lo, hi]
    double halfwidth = 0;  // confidence half-width for fitted exponents, 0 otherwise
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool known_unattainable = false;  // fails for a documented mathematical reason
    std::string note;
    std::vector<Measurement> measurements;
    double seconds = 0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240607;
    int threads = 1;
    IntegratorConfig drift_integrator;  // used by the energy-drift check only
};

// Criteria 1..12.
std::vector<int> acceptance_ids();
std::string criterion_name(int id);
CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});

// Relative energy drift of a reference hyperbolic three-body run with the given integrator.
CriterionResult energy_drift_check(const IntegratorConfig& cfg);

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opt = {});

// Criteria allowed to fail in the ctest gate, each with an analysis in the README.
bool is_known_unattainable(int id);

}  // namespace nbs
