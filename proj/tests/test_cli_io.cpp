#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nbscatter/runners.hpp"
#include "test_util.hpp"

using namespace nbs;
using namespace nbs::testing;
namespace fs = std::filesystem;

namespace {

const char* kSimulate = R"(scenario: simulate
system:
  n: 2
  d: 2
  masses: [1, 2]
  potential: {kind: newtonian}
horizon: 20
checkpoints: 5
states:
  - q: [0, 0, 5, 1]
    p: [0.3, 0, -0.3, 0.1]
  - q: [0, 0, 8, -1]
    p: [0.5, 0.1, -0.5, 0]
output: {format: both}
)";

const char* kClassify = R"(scenario: classify
seed: 3
system:
  n: 3
  d: 2
  masses: [1, 2, 0.5]
  potential: {kind: newtonian}
sampler: {count: 3}
horizon: 50
transform: {T_max: 1.0e4}
)";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("nbscat_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parses and fills defaults") {
    const ExperimentConfig cfg = parse_config(kSimulate);
    CHECK(cfg.scenario == Scenario::simulate);
    CHECK(cfg.system.n == 2);
    CHECK(cfg.system.masses == std::vector<double>{1, 2});
    CHECK(cfg.system.potential.alpha == 1.0);
    CHECK(cfg.system.potential.coupling(0, 1) == doctest::Approx(-2.0));
    REQUIRE(cfg.states.size() == 2);
    CHECK(cfg.states[1].q(2) == 8);
    CHECK(cfg.checkpoints == 5);
    CHECK(cfg.output.csv);
    CHECK(cfg.output.json);
    CHECK(cfg.integrator.rel_tol == IntegratorConfig{}.rel_tol);
}

TEST_CASE("config errors name the line and the field") {
    std::string text = kSimulate;
    text.replace(text.find("[1, 2]"), 6, "[1, -2]");
    const std::string e = error_of(text);
    CHECK(e.find("line 5") != std::string::npos);
    CHECK(e.find("system.masses[1]") != std::string::npos);
    CHECK(e.find("positive") != std::string::npos);

    CHECK(error_of("scenario: simulate\nsystem: {n: 2, d: 2, masses: [1, 1], colour: red}\n").find("system.colour: unknown field") !=
          std::string::npos);
    CHECK(error_of("scenario: launch\n").find("unknown scenario") != std::string::npos);
    CHECK(error_of("seed: 1\n").find("scenario: required") != std::string::npos);
    CHECK(error_of("scenario: [simulate\n").find("malformed YAML") != std::string::npos);
    CHECK(error_of("scenario: simulate\nsystem: {n: 2, d: 2, masses: [1, 1]}\nstates:\n  - {q: [0, 0, 1], p: [0, 0, 0, 0]}\n")
              .find("states[0].q") != std::string::npos);
    CHECK(error_of("scenario: simulate\nsystem: {n: 2, d: 2, masses: [1, 1]}\n").find("at least one entry in states") !=
          std::string::npos);
    CHECK(error_of("scenario: verify\ncriteria: [3, 13]\n").find("criteria[1]") != std::string::npos);
    CHECK(error_of("scenario: verify\nintegrator: {method: euler}\n").find("integrator.method") != std::string::npos);
    CHECK(error_of("scenario: verify\ntransform: {T_first: 100, T_max: 10}\n").find("transform.T_max") !=
          std::string::npos);
    CHECK(error_of(std::string(kSimulate) + "threads: 0\n").find("threads") != std::string::npos);
}

TEST_CASE("coupling matrices must be symmetric and potential kinds are checked") {
    const std::string base = "scenario: verify\nsystem:\n  n: 2\n  d: 1\n  masses: [1, 1]\n  potential: ";
    CHECK(error_of(base + "{kind: homogeneous, alpha: 1, coupling: [[0, 1], [2, 0]]}\n").find("symmetric") !=
          std::string::npos);
    CHECK(error_of(base + "{kind: soft_power, alpha: 1, coupling: 1}\n").find("system.potential.softening") !=
          std::string::npos);
    CHECK(error_of(base + "{kind: yukawa}\n").find("system.potential.kind") != std::string::npos);
    const ExperimentConfig ok = parse_config(base + "{kind: gaussian_bump, alpha: 3, coupling: 0.5, width: 2}\n");
    CHECK(ok.system.potential.kind == PotentialModel::Kind::gaussian_bump);
    CHECK(ok.system.potential.width == 2);
}

TEST_CASE("config hash is stable and content-sensitive") {
    const ExperimentConfig a = parse_config(kSimulate), b = parse_config(kSimulate);
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    std::string text = kSimulate;
    text.replace(text.find("horizon: 20"), 11, "horizon: 21");
    CHECK(config_hash(parse_config(text)) != config_hash(a));
}

TEST_CASE("property: format_double round-trips") {
    for (int trial = 0; trial < 500; ++trial) {
        CounterRng rng(61, trial);
        const double x = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
        CHECK(std::stod(format_double(x)) == x);
    }
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("JSON records round-trip, including non-finite values") {
    ClassifyRecord c;
    c.index = 4;
    CounterRng rng(62, 0);
    c.x0 = PhaseState(random_vector(rng, 4), Vec::LinSpaced(4, 0, 3));
    c.entry_time = std::numeric_limits<double>::infinity();
    c.start_margin = -std::numeric_limits<double>::infinity();
    c.p_plus = Vec::Constant(4, 1.0 / 3);
    c.error = "quote \" inside";
    const nlohmann::json j = c;
    const ClassifyRecord d = nlohmann::json::parse(j.dump()).get<ClassifyRecord>();
    CHECK(d.index == 4);
    CHECK(d.x0.p == c.x0.p);
    CHECK(d.p_plus == c.p_plus);
    CHECK(std::isinf(d.entry_time));
    CHECK(d.start_margin < 0);
    CHECK(d.error == c.error);

    CriterionResult r;
    r.id = 7;
    r.name = "x";
    r.measurements.push_back({"m", 0.25, "in", 0.1, 0.3, 0.01, true});
    const CriterionResult s = nlohmann::json::parse(nlohmann::json(r).dump()).get<CriterionResult>();
    REQUIRE(s.measurements.size() == 1);
    CHECK(s.measurements[0].hi == 0.3);
    CHECK(s.measurements[0].pass);
}

TEST_CASE("trajectory CSV header and rows") {
    const ExperimentConfig cfg = parse_config(kSimulate);
    CHECK(trajectory_csv_header(cfg.system) == "t,q0,q1,q2,q3,p0,p1,p2,p3,H,q_min,margin1,margin2,margin3");
    const auto rs = run_simulate(cfg);
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].t == std::vector<double>{0, 5, 10, 15, 20});
    std::ostringstream ss;
    write_trajectory_csv(ss, cfg.system, rs[0]);
    std::istringstream in(ss.str());
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 6);
    CHECK(ss.str().find("\n0,0,0,5,1,0.3,0,-0.3,0.1,") != std::string::npos);
    const double drift = std::abs(rs[0].energy.back() - rs[0].energy.front());
    CHECK(drift < 1e-10);
}

TEST_CASE("runs are deterministic across thread counts") {
    ExperimentConfig cfg = parse_config(kClassify);
    cfg.threads = 1;
    const nlohmann::json a = nlohmann::json(run_classify(cfg));
    cfg.threads = 3;
    const nlohmann::json b = nlohmann::json(run_classify(cfg));
    CHECK(a.dump() == b.dump());
    CHECK(a.size() == 3);

    ExperimentConfig sim = parse_config(kSimulate);
    sim.output.dir = scratch("det1").string();
    run_experiment(sim);
    const std::string first = slurp(fs::path(sim.output.dir) / "simulate.json");
    sim.threads = 2;
    sim.output.dir = scratch("det2").string();
    const RunOutcome o = run_experiment(sim);
    CHECK(o.exit_code == kExitOk);
    CHECK(slurp(fs::path(sim.output.dir) / "simulate.json") == first);
    CHECK(fs::exists(fs::path(sim.output.dir) / "trajectory_1.csv"));
    CHECK(fs::exists(fs::path(sim.output.dir) / "run_meta.json"));
}

TEST_CASE("the command-line tool: outputs, exit codes, overrides") {
    const char* bin = std::getenv("NBSCAT_BIN");
    if (!bin) {
        MESSAGE("NBSCAT_BIN not set; skipping binary checks");
        return;
    }
    const fs::path dir = scratch("cli");
    const fs::path cfg = dir / "sim.yaml";
    std::ofstream(cfg) << kSimulate;
    const std::string b = std::string("\"") + bin + "\"";
    auto run = [&](const std::string& args) {
        const int rc = std::system((b + " " + args + " > \"" + (dir / "log.txt").string() + "\" 2>&1").c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    };

    CHECK(run("simulate -q --config \"" + cfg.string() + "\" --out \"" + (dir / "a").string() + "\"") == 0);
    CHECK(run("simulate -q --config \"" + cfg.string() + "\" --out \"" + (dir / "b").string() + "\" --threads 2") == 0);
    CHECK(slurp(dir / "a" / "simulate.json") == slurp(dir / "b" / "simulate.json"));
    CHECK(slurp(dir / "a" / "trajectory_0.csv") == slurp(dir / "b" / "trajectory_0.csv"));

    // --horizon overrides the config
    CHECK(run("simulate -q --config \"" + cfg.string() + "\" --out \"" + (dir / "c").string() + "\" --horizon 40") == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "c" / "simulate.json"));
    CHECK(doc["schema_version"] == kSchemaVersion);
    CHECK(doc["results"][0]["t"].back().get<double>() == 40.0);

    // NBSCAT_OUT is used when --out is absent
    const int rc = std::system(("NBSCAT_OUT=\"" + (dir / "d").string() + "\" " + b + " simulate -q --config \"" +
                                cfg.string() + "\"").c_str());
    CHECK(WEXITSTATUS(rc) == 0);
    CHECK(fs::exists(dir / "d" / "simulate.json"));

    const fs::path bad = dir / "bad.yaml";
    std::ofstream(bad) << "scenario: simulate\nsystem: {n: 2, d: 2, masses: [1, 0]}\n";
    CHECK(run("simulate --config \"" + bad.string() + "\"") == kExitValidation);
    CHECK(slurp(dir / "log.txt").find("system.masses[1]") != std::string::npos);
    CHECK(run("simulate") == kExitValidation);
    CHECK(run("launch") == kExitValidation);
    CHECK(run("classify --config \"" + cfg.string() + "\"") == kExitValidation);  // scenario mismatch
    CHECK(run("verify -q --criteria 10 --out \"" + (dir / "v").string() + "\"") == 0);
    const auto v = nlohmann::json::parse(slurp(dir / "v" / "verify.json"));
    CHECK(v["results"][0]["id"] == 10);
    CHECK(v["results"][0]["pass"] == true);
}
