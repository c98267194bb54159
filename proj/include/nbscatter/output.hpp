#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "nbscatter/acceptance.hpp"
#include "nbscatter/config.hpp"
#include "nbscatter/free_region.hpp"
#include "nbscatter/scattering.hpp"

namespace nbs {

inline constexpr int kSchemaVersion = 1;

// One simulated orbit sampled at the requested checkpoints.
struct TrajectoryRecord {
    int index = 0;
    std::string status = "completed";
    std::vector<double> t;
    std::vector<PhaseState> x;
    std::vector<double> energy;
    std::vector<double> q_min;
    std::vector<Membership> region;
};

struct ClassifyRecord {
    int index = 0;
    PhaseState x0;
    bool inside_at_start = false;
    double start_margin = 0;
    bool entered = false;
    double entry_time = 0;
    Vec p_plus;
    bool converged = false;
    double residual = 0;
    bool dispersing = false;
    std::string error;  // non-empty when the orbit could not be classified
};

struct ScatterRecord {
    int index = 0;
    PhaseState incoming;
    PhaseState x0;
    PhaseState outgoing;
    std::string comparison;
    double incoming_residual = 0, outgoing_residual = 0;
    bool converged = false;
    double deflection = 0;
    std::string error;
};

struct SweepRecord {
    double b = 0;
    double deflection = 0;        // numerical
    double deflection_exact = 0;  // 2 asin(1/e)
    double error = 0;
    bool converged = false;
};

void to_json(nlohmann::json& j, const PhaseState& x);
void from_json(const nlohmann::json& j, PhaseState& x);
void to_json(nlohmann::json& j, const Membership& m);
void from_json(const nlohmann::json& j, Membership& m);
void to_json(nlohmann::json& j, const TrajectoryRecord& r);
void from_json(const nlohmann::json& j, TrajectoryRecord& r);
void to_json(nlohmann::json& j, const ClassifyRecord& r);
void from_json(const nlohmann::json& j, ClassifyRecord& r);
void to_json(nlohmann::json& j, const ScatterRecord& r);
void from_json(const nlohmann::json& j, ScatterRecord& r);
void to_json(nlohmann::json& j, const SweepRecord& r);
void from_json(const nlohmann::json& j, SweepRecord& r);
void to_json(nlohmann::json& j, const Measurement& m);
void from_json(const nlohmann::json& j, Measurement& m);
void to_json(nlohmann::json& j, const CriterionResult& r);
void from_json(const nlohmann::json& j, CriterionResult& r);

// Envelope shared by every result file: schema_version, scenario, config_hash, seed, results.
nlohmann::json result_document(const ExperimentConfig& cfg, nlohmann::json results);

// t, q0..q{nd-1}, p0..p{nd-1}, H, q_min, margin1, margin2, margin3
std::string trajectory_csv_header(const SystemSpec& spec);
void write_trajectory_csv(std::ostream& out, const SystemSpec& spec, const TrajectoryRecord& r);
void write_classify_csv(std::ostream& out, const std::vector<ClassifyRecord>& rs);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& rs);

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace nbs
