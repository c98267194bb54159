#include "nbscatter/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nbs {

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::simulate: return "simulate";
        case Scenario::classify: return "classify";
        case Scenario::scatter: return "scatter";
        case Scenario::verify: return "verify";
        case Scenario::sweep: return "sweep";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& s) {
    for (Scenario c : {Scenario::simulate, Scenario::classify, Scenario::scatter, Scenario::verify, Scenario::sweep})
        if (s == to_string(c)) return c;
    throw ValidationError("unknown scenario '" + s + "' (simulate, classify, scatter, verify, sweep)");
}

FreeRegionParams ExperimentConfig::region() const {
    return free_region ? *free_region : FreeRegionParams::defaults(system);
}

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& why) {
    std::string where = node.Mark().is_null() ? "" : "line " + std::to_string(node.Mark().line + 1) + ": ";
    throw ValidationError(where + field + ": " + why);
}

// Rejects keys outside `allowed` so that typos do not pass silently.
void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node.IsMap()) fail(node, path, "expected a mapping");
    for (const auto& kv : node) {
        const std::string key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(kv.first, path.empty() ? key : path + "." + key, "unknown field");
    }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) fail(node, field, "expected a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(node, field, "cannot parse '" + node.Scalar() + "'");
    }
}

template <class T>
void read(const YAML::Node& parent, const std::string& key, const std::string& path, T& out) {
    if (const YAML::Node n = parent[key]) out = scalar<T>(n, path + key);
}

double positive(const YAML::Node& node, const std::string& field) {
    const double v = scalar<double>(node, field);
    if (!(v > 0)) fail(node, field, "must be positive");
    return v;
}

Vec vector_of(const YAML::Node& node, const std::string& field) {
    if (!node.IsSequence()) fail(node, field, "expected a list of numbers");
    Vec v(static_cast<Eigen::Index>(node.size()));
    for (std::size_t i = 0; i < node.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = scalar<double>(node[i], field + "[" + std::to_string(i) + "]");
    return v;
}

Mat coupling_of(const YAML::Node& node, int n, const std::string& field) {
    if (node.IsScalar()) {
        Mat I = Mat::Constant(n, n, scalar<double>(node, field));
        I.diagonal().setZero();
        return I;
    }
    if (!node.IsSequence() || static_cast<int>(node.size()) != n) fail(node, field, "expected a scalar or an n x n matrix");
    Mat I(n, n);
    for (int i = 0; i < n; ++i) {
        const Vec row = vector_of(node[i], field + "[" + std::to_string(i) + "]");
        if (row.size() != n) fail(node[i], field + "[" + std::to_string(i) + "]", "row must have n entries");
        I.row(i) = row.transpose();
    }
    if (!I.isApprox(I.transpose())) fail(node, field, "matrix must be symmetric");
    I.diagonal().setZero();
    return I;
}

void parse_system(const YAML::Node& node, ExperimentConfig& cfg) {
    check_keys(node, "system", {"n", "d", "masses", "potential", "collision_radius"});
    SystemSpec& s = cfg.system;
    if (!node["n"] || !node["d"] || !node["masses"]) fail(node, "system", "needs n, d and masses");
    s.n = scalar<int>(node["n"], "system.n");
    s.d = scalar<int>(node["d"], "system.d");
    if (s.n < 1) fail(node["n"], "system.n", "must be at least 1");
    if (s.d < 1) fail(node["d"], "system.d", "must be at least 1");
    const YAML::Node m = node["masses"];
    if (!m.IsSequence() || static_cast<int>(m.size()) != s.n) fail(m, "system.masses", "expected n masses");
    s.masses.clear();
    for (std::size_t i = 0; i < m.size(); ++i) s.masses.push_back(positive(m[i], "system.masses[" + std::to_string(i) + "]"));
    read(node, "collision_radius", "system.", s.collision_radius);

    const YAML::Node p = node["potential"];
    if (!p) {
        s.potential = PotentialModel::uniform(s.n, 1.0, 0.0);
        return;
    }
    check_keys(p, "system.potential", {"kind", "alpha", "coupling", "G", "softening", "width"});
    const std::string kind = p["kind"] ? scalar<std::string>(p["kind"], "system.potential.kind") : "homogeneous";
    if (kind == "newtonian") {
        double G = 1.0;
        read(p, "G", "system.potential.", G);
        s.potential = PotentialModel::newtonian(s.masses, G);
        return;
    }
    double alpha = 1.0;
    if (p["alpha"]) alpha = positive(p["alpha"], "system.potential.alpha");
    const Mat I = p["coupling"] ? coupling_of(p["coupling"], s.n, "system.potential.coupling") : Mat::Zero(s.n, s.n);
    if (kind == "homogeneous") {
        s.potential = PotentialModel::homogeneous(alpha, I);
    } else if (kind == "soft_power") {
        if (!p["softening"]) fail(p, "system.potential.softening", "required for soft_power");
        s.potential = PotentialModel::soft_power(alpha, I, positive(p["softening"], "system.potential.softening"));
    } else if (kind == "gaussian_bump") {
        if (!p["width"]) fail(p, "system.potential.width", "required for gaussian_bump");
        s.potential = PotentialModel::gaussian_bump(alpha, I, positive(p["width"], "system.potential.width"));
    } else {
        fail(p["kind"], "system.potential.kind", "unknown kind '" + kind + "' (homogeneous, newtonian, soft_power, gaussian_bump)");
    }
}

void parse_integrator(const YAML::Node& node, IntegratorConfig& c, const std::string& path) {
    check_keys(node, path, {"method", "rel_tol", "abs_tol", "max_step", "first_step", "fixed_step", "max_steps"});
    if (const YAML::Node m = node["method"]) {
        const std::string s = scalar<std::string>(m, path + ".method");
        if (s == "dop853") c.method = IntegratorMethod::dop853;
        else if (s == "symplectic6") c.method = IntegratorMethod::symplectic6;
        else fail(m, path + ".method", "expected dop853 or symplectic6");
    }
    if (node["rel_tol"]) c.rel_tol = positive(node["rel_tol"], path + ".rel_tol");
    if (node["abs_tol"]) c.abs_tol = positive(node["abs_tol"], path + ".abs_tol");
    if (node["max_step"]) c.max_step = positive(node["max_step"], path + ".max_step");
    if (node["first_step"]) c.first_step = positive(node["first_step"], path + ".first_step");
    if (node["fixed_step"]) c.fixed_step = positive(node["fixed_step"], path + ".fixed_step");
    read(node, "max_steps", path + ".", c.max_steps);
}

void parse_transform(const YAML::Node& node, TransformConfig& c) {
    check_keys(node, "transform", {"T_first", "T_max", "tol", "window", "value_window", "basis_terms", "use_derivatives"});
    if (node["T_first"]) c.T_first = positive(node["T_first"], "transform.T_first");
    if (node["T_max"]) c.T_max = positive(node["T_max"], "transform.T_max");
    if (node["tol"]) c.tol = positive(node["tol"], "transform.tol");
    read(node, "window", "transform.", c.window);
    read(node, "value_window", "transform.", c.value_window);
    read(node, "basis_terms", "transform.", c.basis_terms);
    read(node, "use_derivatives", "transform.", c.use_derivatives);
    if (c.window < 2) fail(node["window"], "transform.window", "must be at least 2");
    if (c.value_window < 2) fail(node["value_window"], "transform.value_window", "must be at least 2");
    if (c.basis_terms < 0) fail(node["basis_terms"], "transform.basis_terms", "must be non-negative");
    if (!(c.T_max > c.T_first)) fail(node, "transform.T_max", "must exceed T_first");
}

void parse_states(const YAML::Node& node, ExperimentConfig& cfg) {
    if (!node.IsSequence()) fail(node, "states", "expected a list of {p, q}");
    const Eigen::Index m = cfg.system.dim();
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string path = "states[" + std::to_string(i) + "]";
        const YAML::Node s = node[i];
        check_keys(s, path, {"p", "q"});
        if (!s["p"] || !s["q"]) fail(s, path, "needs p and q");
        const Vec p = vector_of(s["p"], path + ".p"), q = vector_of(s["q"], path + ".q");
        if (p.size() != m) fail(s["p"], path + ".p", "expected n*d = " + std::to_string(m) + " entries");
        if (q.size() != m) fail(s["q"], path + ".q", "expected n*d = " + std::to_string(m) + " entries");
        cfg.states.emplace_back(p, q);
    }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ValidationError("line " + std::to_string(e.mark.line + 1) + ": malformed YAML: " + e.msg);
    }
    ExperimentConfig cfg;
    cfg.source = text;
    if (!root || root.IsNull()) throw ValidationError("config is empty");
    check_keys(root, "", {"scenario", "system", "integrator", "transform", "free_region", "horizon", "checkpoints",
                          "seed", "threads", "states", "sampler", "sweep", "criteria", "output"});
    if (!root["scenario"]) fail(root, "scenario", "required");
    try {
        cfg.scenario = scenario_from_string(scalar<std::string>(root["scenario"], "scenario"));
    } catch (const ValidationError& e) {
        fail(root["scenario"], "scenario", e.what());
    }

    if (root["system"]) parse_system(root["system"], cfg);
    else if (cfg.scenario != Scenario::verify && cfg.scenario != Scenario::sweep) fail(root, "system", "required");

    if (root["integrator"]) parse_integrator(root["integrator"], cfg.integrator, "integrator");
    if (root["transform"]) parse_transform(root["transform"], cfg.transform);
    if (const YAML::Node f = root["free_region"]) {
        check_keys(f, "free_region", {"delta", "C", "eps_margin", "short_range"});
        FreeRegionParams prm = FreeRegionParams::defaults(cfg.system);
        if (f["short_range"]) {
            try {
                prm = FreeRegionParams::defaults(cfg.system, scalar<bool>(f["short_range"], "free_region.short_range"));
            } catch (const DomainError& e) {
                fail(f["short_range"], "free_region.short_range", e.what());
            }
        }
        if (f["delta"]) prm.delta = positive(f["delta"], "free_region.delta");
        if (f["C"]) prm.C = positive(f["C"], "free_region.C");
        read(f, "eps_margin", "free_region.", prm.eps_margin);
        cfg.free_region = prm;
    }
    if (root["horizon"]) cfg.horizon = positive(root["horizon"], "horizon");
    if (const YAML::Node c = root["checkpoints"]) {
        cfg.checkpoints = scalar<int>(c, "checkpoints");
        if (cfg.checkpoints < 2) fail(c, "checkpoints", "must be at least 2");
    }
    read(root, "seed", "", cfg.seed);
    if (const YAML::Node t = root["threads"]) {
        cfg.threads = scalar<int>(t, "threads");
        if (cfg.threads < 1) fail(t, "threads", "must be at least 1");
    }
    if (root["states"]) {
        if (!root["system"]) fail(root["states"], "states", "needs a system");
        parse_states(root["states"], cfg);
    }
    if (const YAML::Node s = root["sampler"]) {
        check_keys(s, "sampler", {"count", "speed_lo", "speed_hi", "min_pair_speed", "perturbation", "max_tries"});
        read(s, "count", "sampler.", cfg.sampler.count);
        read(s, "speed_lo", "sampler.", cfg.sampler.options.speed_lo);
        read(s, "speed_hi", "sampler.", cfg.sampler.options.speed_hi);
        read(s, "min_pair_speed", "sampler.", cfg.sampler.options.min_pair_speed);
        read(s, "perturbation", "sampler.", cfg.sampler.options.perturbation);
        read(s, "max_tries", "sampler.", cfg.sampler.options.max_tries);
        if (cfg.sampler.count < 0) fail(s["count"], "sampler.count", "must be non-negative");
        if (!(cfg.sampler.options.speed_hi >= cfg.sampler.options.speed_lo && cfg.sampler.options.speed_lo > 0))
            fail(s, "sampler.speed_lo", "need 0 < speed_lo <= speed_hi");
    }
    if (const YAML::Node s = root["sweep"]) {
        check_keys(s, "sweep", {"m1", "m2", "v_inf", "b_from", "b_to", "count"});
        SweepConfig& w = cfg.sweep;
        if (s["m1"]) w.m1 = positive(s["m1"], "sweep.m1");
        if (s["m2"]) w.m2 = positive(s["m2"], "sweep.m2");
        if (s["v_inf"]) w.v_inf = positive(s["v_inf"], "sweep.v_inf");
        if (s["b_from"]) w.b_from = positive(s["b_from"], "sweep.b_from");
        if (s["b_to"]) w.b_to = positive(s["b_to"], "sweep.b_to");
        read(s, "count", "sweep.", w.count);
        if (w.count < 1) fail(s["count"], "sweep.count", "must be at least 1");
    }
    if (const YAML::Node c = root["criteria"]) {
        if (!c.IsSequence()) fail(c, "criteria", "expected a list of criterion numbers");
        for (std::size_t i = 0; i < c.size(); ++i) {
            const int id = scalar<int>(c[i], "criteria[" + std::to_string(i) + "]");
            if (id < 1 || id > 12) fail(c[i], "criteria[" + std::to_string(i) + "]", "must be in 1..12");
            cfg.criteria.push_back(id);
        }
    }
    if (const YAML::Node o = root["output"]) {
        check_keys(o, "output", {"dir", "format"});
        read(o, "dir", "output.", cfg.output.dir);
        if (const YAML::Node f = o["format"]) {
            const std::string s = scalar<std::string>(f, "output.format");
            if (s == "csv") cfg.output = {cfg.output.dir, true, false};
            else if (s == "json") cfg.output = {cfg.output.dir, false, true};
            else if (s == "both") cfg.output = {cfg.output.dir, true, true};
            else fail(f, "output.format", "expected csv, json or both");
        }
    }
    try {
        validate(cfg);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
    const bool needs_system = cfg.scenario != Scenario::verify && cfg.scenario != Scenario::sweep;
    if (needs_system) cfg.system.validate();
    if (cfg.scenario == Scenario::simulate && cfg.states.empty())
        throw ValidationError("simulate needs at least one entry in states");
    if (cfg.scenario == Scenario::classify && cfg.states.empty() && cfg.sampler.count == 0)
        throw ValidationError("classify needs states or sampler.count > 0");
    if (cfg.scenario == Scenario::scatter && cfg.states.empty())
        throw ValidationError("scatter needs incoming data in states");
    if (cfg.sweep.b_to < cfg.sweep.b_from) throw ValidationError("sweep.b_to must not be below sweep.b_from");
    for (std::size_t i = 0; i < cfg.states.size(); ++i)
        if (!cfg.states[i].p.allFinite() || !cfg.states[i].q.allFinite())
            throw ValidationError("states[" + std::to_string(i) + "] has non-finite entries");
}

std::string config_hash(const ExperimentConfig& cfg) {
    // The parsed source text is the canonical input; whitespace-only edits change the hash, which is acceptable.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : cfg.source) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    const std::string extra = std::to_string(cfg.seed) + "/" + std::to_string(cfg.horizon);
    for (unsigned char c : extra) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nbs
