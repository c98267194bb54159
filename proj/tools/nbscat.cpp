#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "nbscatter/runners.hpp"

using namespace nbs;

namespace {

struct Args {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<double> horizon;
    std::vector<int> criteria;
    bool strict = false;
    bool quiet = false;
};

int run(Scenario scenario, const Args& a) {
    try {
        ExperimentConfig cfg;
        if (!a.config.empty()) {
            cfg = load_config(a.config);
            if (cfg.scenario != scenario)
                throw ValidationError(std::string("config scenario is '") + to_string(cfg.scenario) +
                                      "' but the subcommand is '" + to_string(scenario) + "'");
        } else if (scenario == Scenario::verify || scenario == Scenario::sweep) {
            cfg.scenario = scenario;
        } else {
            throw ValidationError(std::string(to_string(scenario)) + " needs --config");
        }
        if (const char* env = std::getenv("NBSCAT_OUT"); env && *env) cfg.output.dir = env;
        if (!a.out.empty()) cfg.output.dir = a.out;
        if (a.seed) cfg.seed = *a.seed;
        if (a.threads) cfg.threads = *a.threads;
        if (a.horizon) cfg.horizon = *a.horizon;
        if (!a.criteria.empty()) cfg.criteria = a.criteria;
        if (cfg.threads < 1) throw ValidationError("--threads must be at least 1");
        if (!(cfg.horizon > 0)) throw ValidationError("--horizon must be positive");
        for (int id : cfg.criteria)
            if (id < 1 || id > 12) throw ValidationError("criteria must be in 1..12");
        validate(cfg);

        RunOptions opt;
        opt.strict = a.strict;
        const RunOutcome o = run_experiment(cfg, opt);
        if (!a.quiet) {
            std::cout << o.table;
            std::cout << "wrote";
            for (const auto& f : o.files) std::cout << ' ' << cfg.output.dir << '/' << f;
            std::cout << ' ' << cfg.output.dir << "/run_meta.json\n";
        }
        return o.exit_code;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const SeminormError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return kExitNonConvergence;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"N-body scattering: free-region classification, asymptotic data, Moller transforms"};
    app.require_subcommand(1);
    Args a;

    const std::pair<Scenario, const char*> subs[] = {
        {Scenario::simulate, "integrate orbits and record checkpoints, energy and free-region margins"},
        {Scenario::classify, "entry time into the free region and asymptotic velocity of each state"},
        {Scenario::scatter, "scattering map of incoming asymptotic data"},
        {Scenario::verify, "run the acceptance criteria"},
        {Scenario::sweep, "Kepler deflection angle against impact parameter"},
    };
    for (const auto& [scenario, help] : subs) {
        CLI::App* sub = app.add_subcommand(to_string(scenario), help);
        sub->add_option("-c,--config", a.config, "YAML experiment file")->check(CLI::ExistingFile);
        sub->add_option("-o,--out", a.out, "output directory (overrides config and NBSCAT_OUT)");
        sub->add_option("--seed", a.seed, "random seed");
        sub->add_option("--threads", a.threads, "worker threads");
        sub->add_option("--horizon", a.horizon, "integration horizon");
        sub->add_flag("-q,--quiet", a.quiet, "no table on stdout");
        if (scenario == Scenario::verify) {
            sub->add_option("--criteria", a.criteria, "criterion numbers (default: all)");
            sub->add_flag("--strict", a.strict, "exit 2 when a criterion fails");
        }
        sub->callback([&a, scenario = scenario] { throw CLI::RuntimeError(run(scenario, a)); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::RuntimeError& e) {
        return e.get_exit_code();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }
    return 0;
}
