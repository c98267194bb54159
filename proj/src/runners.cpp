#include "nbscatter/runners.hpp"

#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "nbscatter/acceptance.hpp"
#include "nbscatter/oracles.hpp"
#include "parallel.hpp"

namespace nbs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<PhaseState> initial_states(const ExperimentConfig& cfg) {
    if (cfg.sampler.count == 0) return cfg.states;
    std::vector<PhaseState> xs(static_cast<std::size_t>(cfg.sampler.count));
    const FreeRegionParams prm = cfg.region();
    parallel_for(xs.size(), cfg.threads, [&](std::size_t i) {
        CounterRng rng(cfg.seed, i);
        xs[i] = sample_free_state(cfg.system, prm, rng, cfg.sampler.options);
    });
    return xs;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::vector<TrajectoryRecord> run_simulate(const ExperimentConfig& cfg) {
    std::vector<double> ts(static_cast<std::size_t>(cfg.checkpoints));
    for (int k = 0; k < cfg.checkpoints; ++k) ts[k] = cfg.horizon * k / (cfg.checkpoints - 1);
    IntegratorConfig ic = cfg.integrator;
    ic.store_steps = false;
    const FreeRegionParams prm = cfg.region();
    std::vector<TrajectoryRecord> out(cfg.states.size());
    parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
        const Trajectory tr = integrate(cfg.system, cfg.states[i], 0.0, cfg.horizon, ic, ts);
        TrajectoryRecord& r = out[i];
        r.index = static_cast<int>(i);
        r.status = to_string(tr.status);
        r.t = tr.checkpoint_t;
        r.x = tr.checkpoint_x;
        for (const PhaseState& x : r.x) {
            r.energy.push_back(hamiltonian(cfg.system, x));
            r.q_min.push_back(q_min(cfg.system, x.q));
            r.region.push_back(membership(cfg.system, x, prm));
        }
    });
    return out;
}

std::vector<ClassifyRecord> run_classify(const ExperimentConfig& cfg) {
    const std::vector<PhaseState> xs = initial_states(cfg);
    const FreeRegionParams prm = cfg.region();
    std::vector<ClassifyRecord> out(xs.size());
    parallel_for(xs.size(), cfg.threads, [&](std::size_t i) {
        ClassifyRecord& r = out[i];
        r.index = static_cast<int>(i);
        r.x0 = xs[i];
        try {
            const Membership m = membership(cfg.system, xs[i], prm);
            r.inside_at_start = m.inside;
            r.start_margin = m.min_margin();
            const EntryResult e = entry_time(cfg.system, xs[i], prm, cfg.horizon, cfg.integrator);
            r.entered = e.found;
            r.entry_time = e.found ? e.t : cfg.horizon;
            const ScatteringDatum d = asymptotic_velocity(cfg.system, xs[i], 1, cfg.transform);
            r.p_plus = d.p;
            r.converged = d.converged;
            r.residual = d.residual;
            r.dispersing = d.dispersing;
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    });
    return out;
}

std::vector<ScatterRecord> run_scatter(const ExperimentConfig& cfg) {
    std::vector<ScatterRecord> out(cfg.states.size());
    parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
        ScatterRecord& r = out[i];
        r.index = static_cast<int>(i);
        r.incoming = cfg.states[i];
        try {
            const ScatterResult s = scattering_map(cfg.system, cfg.states[i], cfg.transform);
            r.x0 = s.x0;
            r.outgoing = s.outgoing.state();
            r.comparison = to_string(s.comparison);
            r.incoming_residual = s.incoming.residual;
            r.outgoing_residual = s.outgoing.residual;
            r.converged = s.incoming.converged && s.outgoing.converged;
            if (cfg.system.n >= 2) r.deflection = deflection_angle(cfg.system, r.incoming.p, r.outgoing.p);
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    });
    return out;
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg) {
    const SweepConfig& w = cfg.sweep;
    SystemSpec spec;
    spec.n = 2;
    spec.d = 2;
    spec.masses = {w.m1, w.m2};
    spec.potential = PotentialModel::newtonian(spec.masses);
    const double M = w.m1 + w.m2;
    std::vector<SweepRecord> out(static_cast<std::size_t>(w.count));
    parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
        SweepRecord& r = out[i];
        r.b = w.count == 1 ? w.b_from : w.b_from + (w.b_to - w.b_from) * static_cast<double>(i) / (w.count - 1);
        r.deflection_exact = kepler_hyperbola(w.m1, w.m2, w.m1 * w.m2, w.v_inf, r.b).deflection();
        // Relative velocity along +x, relative offset b along +y, centre of mass at rest.
        Vec q(4), p(4);
        q << 0, (w.m2 / M) * r.b, 0, -(w.m1 / M) * r.b;
        p << w.m1 * w.m2 / M * w.v_inf, 0, -w.m1 * w.m2 / M * w.v_inf, 0;
        try {
            const ScatterResult s = scattering_map(spec, PhaseState(p, q), cfg.transform);
            r.deflection = deflection_angle(spec, p, s.outgoing.p);
            r.converged = s.incoming.converged && s.outgoing.converged;
        } catch (const std::exception&) {
            r.deflection = std::numeric_limits<double>::quiet_NaN();
        }
        r.error = std::abs(r.deflection - r.deflection_exact);
    });
    return out;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome o;
    std::vector<std::pair<std::string, std::string>> files;  // name, content

    switch (cfg.scenario) {
        case Scenario::simulate: {
            const auto rs = run_simulate(cfg);
            o.document = result_document(cfg, rs);
            o.table = "index status    t_end          H_drift        margin_end\n";
            for (const auto& r : rs) {
                const double drift = r.energy.empty() ? 0.0 : std::abs(r.energy.back() - r.energy.front());
                o.table += fmt::format("{:<5} {:<9} {:<14.6g} {:<14.3e} {:.4g}\n", r.index, r.status,
                                       r.t.empty() ? 0.0 : r.t.back(), drift,
                                       r.region.empty() ? 0.0 : r.region.back().min_margin());
                if (r.status != "completed") o.exit_code = kExitNonConvergence;
                if (cfg.output.csv) {
                    std::ostringstream ss;
                    write_trajectory_csv(ss, cfg.system, r);
                    files.emplace_back(fmt::format("trajectory_{}.csv", r.index), ss.str());
                }
            }
            files.emplace_back("simulate.json", dump(o.document));
            break;
        }
        case Scenario::classify: {
            const auto rs = run_classify(cfg);
            o.document = result_document(cfg, rs);
            o.table = "index inside entered entry_time     p+_converged dispersing\n";
            for (const auto& r : rs)
                o.table += fmt::format("{:<5} {:<6} {:<7} {:<14.6g} {:<12} {}{}\n", r.index, r.inside_at_start,
                                       r.entered, r.entry_time, r.converged, r.dispersing,
                                       r.error.empty() ? "" : "  error: " + r.error);
            if (cfg.output.csv) {
                std::ostringstream ss;
                write_classify_csv(ss, rs);
                files.emplace_back("classify.csv", ss.str());
            }
            files.emplace_back("classify.json", dump(o.document));
            break;
        }
        case Scenario::scatter: {
            const auto rs = run_scatter(cfg);
            o.document = result_document(cfg, rs);
            o.table = "index converged residual_in    residual_out   deflection\n";
            for (const auto& r : rs) {
                o.table += fmt::format("{:<5} {:<9} {:<14.3e} {:<14.3e} {:.12g}{}\n", r.index, r.converged,
                                       r.incoming_residual, r.outgoing_residual, r.deflection,
                                       r.error.empty() ? "" : "  error: " + r.error);
                if (!r.converged) o.exit_code = kExitNonConvergence;
            }
            files.emplace_back("scatter.json", dump(o.document));
            break;
        }
        case Scenario::sweep: {
            const auto rs = run_sweep(cfg);
            o.document = result_document(cfg, rs);
            o.table = "b              deflection         exact              error\n";
            for (const auto& r : rs) {
                o.table += fmt::format("{:<14.6g} {:<18.12g} {:<18.12g} {:.3e}\n", r.b, r.deflection,
                                       r.deflection_exact, r.error);
                if (!r.converged) o.exit_code = kExitNonConvergence;
            }
            if (cfg.output.csv) {
                std::ostringstream ss;
                write_sweep_csv(ss, rs);
                files.emplace_back("sweep.csv", ss.str());
            }
            files.emplace_back("sweep.json", dump(o.document));
            break;
        }
        case Scenario::verify: {
            AcceptanceOptions ao;
            ao.seed = cfg.seed;
            ao.threads = cfg.threads;
            const auto rs = run_acceptance(cfg.criteria.empty() ? acceptance_ids() : cfg.criteria, ao);
            o.document = result_document(cfg, rs);
            for (const auto& r : rs) {
                o.table += fmt::format("{} criterion {}: {}{}\n", r.pass ? "PASS" : "FAIL", r.id, r.name,
                                       r.known_unattainable ? " [known unattainable]" : "");
                for (const auto& m : r.measurements)
                    o.table += fmt::format("    {} = {:.6g} ({} {:.3g}{})\n", m.name, m.value, m.relation,
                                           m.relation == "in" || m.relation == ">" || m.relation == ">=" ? m.lo : m.hi,
                                           m.relation == "in" ? fmt::format("..{:.3g}", m.hi) : "");
                if (!r.pass && !r.known_unattainable && opt.strict) o.exit_code = kExitNonConvergence;
            }
            files.emplace_back("verify.json", dump(o.document));
            break;
        }
    }

    if (opt.write_files) {
        const fs::path dir(cfg.output.dir);
        fs::create_directories(dir);
        for (const auto& [name, text] : files) {
            if (!cfg.output.json && name.ends_with(".json")) continue;
            write_text(dir / name, text);
            o.files.push_back(name);
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const json meta{{"schema_version", kSchemaVersion},
                        {"scenario", to_string(cfg.scenario)},
                        {"config_hash", config_hash(cfg)},
                        {"threads", cfg.threads},
                        {"wall_seconds", seconds},
                        {"exit_code", o.exit_code},
                        {"files", o.files}};
        write_text(dir / "run_meta.json", dump(meta));
    }
    return o;
}

}  // namespace nbs
