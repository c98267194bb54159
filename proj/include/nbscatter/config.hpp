#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbscatter/flows.hpp"
#include "nbscatter/free_region.hpp"
#include "nbscatter/scattering.hpp"

namespace nbs {

enum class Scenario { simulate, classify, scatter, verify, sweep };

const char* to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct SamplerConfig {
    int count = 0;  // 0: use the explicit state list
    SamplerOptions options;
};

struct SweepConfig {
    double m1 = 1, m2 = 1;
    double v_inf = 1;
    double b_from = 1, b_to = 10;
    int count = 10;
};

struct OutputConfig {
    std::string dir = "out";
    bool csv = true;
    bool json = true;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::simulate;
    SystemSpec system;
    IntegratorConfig integrator;
    TransformConfig transform;
    std::optional<FreeRegionParams> free_region;  // defaults(system) when absent
    double horizon = 100;
    int checkpoints = 101;  // simulate: evenly spaced in [0, horizon], endpoints included
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<PhaseState> states;  // simulate/classify initial states, scatter incoming data
    SamplerConfig sampler;
    SweepConfig sweep;
    std::vector<int> criteria;  // verify: empty = all
    OutputConfig output;
    std::string source;         // raw text the config was parsed from

    FreeRegionParams region() const;
};

// Parses YAML text. Errors are ValidationError with "line N: field: reason".
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Checks cross-field constraints (state sizes, positive masses, ...).
void validate(const ExperimentConfig& cfg);

// FNV-1a over the canonical re-serialisation of the parsed config.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace nbs
