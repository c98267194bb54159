#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "nbscatter/config.hpp"
#include "nbscatter/output.hpp"

namespace nbs {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,      // malformed config or arguments
    kExitNonConvergence = 2,  // an orbit failed to integrate or a limit did not settle
};

struct RunOptions {
    bool write_files = true;
    bool strict = false;  // verify: non-waived failures give kExitNonConvergence
};

struct RunOutcome {
    int exit_code = kExitOk;
    nlohmann::json document;         // result_document(...)
    std::string table;               // human-readable summary
    std::vector<std::string> files;  // written paths, relative to the output dir
};

std::vector<TrajectoryRecord> run_simulate(const ExperimentConfig& cfg);
std::vector<ClassifyRecord> run_classify(const ExperimentConfig& cfg);
std::vector<ScatterRecord> run_scatter(const ExperimentConfig& cfg);
std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg);

// Dispatches on cfg.scenario, writes result files into cfg.output.dir and
// run_meta.json (timings, which are not reproducible) next to them.
RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

}  // namespace nbs
