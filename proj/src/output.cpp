#include "nbscatter/output.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace nbs {

using nlohmann::json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

namespace {

// JSON has no encoding for non-finite numbers, so they travel as strings.
json num(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

double get_num(const json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
}

json vec(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
    return a;
}

Vec get_vec(const json& j) {
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_num(j[i]);
    return v;
}

json nums(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(num(x));
    return a;
}

std::vector<double> get_nums(const json& j) {
    std::vector<double> xs;
    for (const auto& e : j) xs.push_back(get_num(e));
    return xs;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + '"';
}

}  // namespace

void to_json(json& j, const PhaseState& x) { j = json{{"p", vec(x.p)}, {"q", vec(x.q)}}; }
void from_json(const json& j, PhaseState& x) { x = PhaseState(get_vec(j.at("p")), get_vec(j.at("q"))); }

void to_json(json& j, const Membership& m) {
    j = json{{"inside", m.inside}, {"margin1", num(m.margin1)}, {"margin2", num(m.margin2)}, {"margin3", num(m.margin3)}};
}
void from_json(const json& j, Membership& m) {
    m.inside = j.at("inside").get<bool>();
    m.margin1 = get_num(j.at("margin1"));
    m.margin2 = get_num(j.at("margin2"));
    m.margin3 = get_num(j.at("margin3"));
}

void to_json(json& j, const TrajectoryRecord& r) {
    j = json{{"index", r.index}, {"status", r.status}, {"t", nums(r.t)}, {"x", r.x},
             {"energy", nums(r.energy)}, {"q_min", nums(r.q_min)}, {"region", r.region}};
}
void from_json(const json& j, TrajectoryRecord& r) {
    r.index = j.at("index").get<int>();
    r.status = j.at("status").get<std::string>();
    r.t = get_nums(j.at("t"));
    r.x = j.at("x").get<std::vector<PhaseState>>();
    r.energy = get_nums(j.at("energy"));
    r.q_min = get_nums(j.at("q_min"));
    r.region = j.at("region").get<std::vector<Membership>>();
}

void to_json(json& j, const ClassifyRecord& r) {
    j = json{{"index", r.index},
             {"x0", r.x0},
             {"inside_at_start", r.inside_at_start},
             {"start_margin", num(r.start_margin)},
             {"entered", r.entered},
             {"entry_time", num(r.entry_time)},
             {"p_plus", vec(r.p_plus)},
             {"converged", r.converged},
             {"residual", num(r.residual)},
             {"dispersing", r.dispersing},
             {"error", r.error}};
}
void from_json(const json& j, ClassifyRecord& r) {
    r.index = j.at("index").get<int>();
    r.x0 = j.at("x0").get<PhaseState>();
    r.inside_at_start = j.at("inside_at_start").get<bool>();
    r.start_margin = get_num(j.at("start_margin"));
    r.entered = j.at("entered").get<bool>();
    r.entry_time = get_num(j.at("entry_time"));
    r.p_plus = get_vec(j.at("p_plus"));
    r.converged = j.at("converged").get<bool>();
    r.residual = get_num(j.at("residual"));
    r.dispersing = j.at("dispersing").get<bool>();
    r.error = j.at("error").get<std::string>();
}

void to_json(json& j, const ScatterRecord& r) {
    j = json{{"index", r.index},
             {"incoming", r.incoming},
             {"x0", r.x0},
             {"outgoing", r.outgoing},
             {"comparison", r.comparison},
             {"incoming_residual", num(r.incoming_residual)},
             {"outgoing_residual", num(r.outgoing_residual)},
             {"converged", r.converged},
             {"deflection", num(r.deflection)},
             {"error", r.error}};
}
void from_json(const json& j, ScatterRecord& r) {
    r.index = j.at("index").get<int>();
    r.incoming = j.at("incoming").get<PhaseState>();
    r.x0 = j.at("x0").get<PhaseState>();
    r.outgoing = j.at("outgoing").get<PhaseState>();
    r.comparison = j.at("comparison").get<std::string>();
    r.incoming_residual = get_num(j.at("incoming_residual"));
    r.outgoing_residual = get_num(j.at("outgoing_residual"));
    r.converged = j.at("converged").get<bool>();
    r.deflection = get_num(j.at("deflection"));
    r.error = j.at("error").get<std::string>();
}

void to_json(json& j, const SweepRecord& r) {
    j = json{{"b", num(r.b)}, {"deflection", num(r.deflection)}, {"deflection_exact", num(r.deflection_exact)},
             {"error", num(r.error)}, {"converged", r.converged}};
}
void from_json(const json& j, SweepRecord& r) {
    r.b = get_num(j.at("b"));
    r.deflection = get_num(j.at("deflection"));
    r.deflection_exact = get_num(j.at("deflection_exact"));
    r.error = get_num(j.at("error"));
    r.converged = j.at("converged").get<bool>();
}

void to_json(json& j, const Measurement& m) {
    j = json{{"name", m.name}, {"value", num(m.value)}, {"relation", m.relation}, {"lo", num(m.lo)},
             {"hi", num(m.hi)},   {"halfwidth", num(m.halfwidth)}, {"pass", m.pass}};
}
void from_json(const json& j, Measurement& m) {
    m.name = j.at("name").get<std::string>();
    m.value = get_num(j.at("value"));
    m.relation = j.at("relation").get<std::string>();
    m.lo = get_num(j.at("lo"));
    m.hi = get_num(j.at("hi"));
    m.halfwidth = get_num(j.at("halfwidth"));
    m.pass = j.at("pass").get<bool>();
}

// Wall-clock seconds are left out on purpose: result files must be reproducible byte for byte.
void to_json(json& j, const CriterionResult& r) {
    j = json{{"id", r.id},     {"name", r.name}, {"pass", r.pass}, {"known_unattainable", r.known_unattainable},
             {"note", r.note}, {"measurements", r.measurements}};
}
void from_json(const json& j, CriterionResult& r) {
    r.id = j.at("id").get<int>();
    r.name = j.at("name").get<std::string>();
    r.pass = j.at("pass").get<bool>();
    r.known_unattainable = j.at("known_unattainable").get<bool>();
    r.note = j.at("note").get<std::string>();
    r.measurements = j.at("measurements").get<std::vector<Measurement>>();
}

json result_document(const ExperimentConfig& cfg, json results) {
    return json{{"schema_version", kSchemaVersion},
                {"scenario", to_string(cfg.scenario)},
                {"config_hash", config_hash(cfg)},
                {"seed", cfg.seed},
                {"results", std::move(results)}};
}

std::string trajectory_csv_header(const SystemSpec& spec) {
    std::string h = "t";
    for (int i = 0; i < spec.dim(); ++i) h += fmt::format(",q{}", i);
    for (int i = 0; i < spec.dim(); ++i) h += fmt::format(",p{}", i);
    return h + ",H,q_min,margin1,margin2,margin3";
}

void write_trajectory_csv(std::ostream& out, const SystemSpec& spec, const TrajectoryRecord& r) {
    out << trajectory_csv_header(spec) << '\n';
    for (std::size_t k = 0; k < r.t.size(); ++k) {
        std::string line = format_double(r.t[k]);
        for (Eigen::Index i = 0; i < r.x[k].q.size(); ++i) line += "," + format_double(r.x[k].q(i));
        for (Eigen::Index i = 0; i < r.x[k].p.size(); ++i) line += "," + format_double(r.x[k].p(i));
        const Membership& m = r.region[k];
        line += "," + format_double(r.energy[k]) + "," + format_double(r.q_min[k]) + "," + format_double(m.margin1) +
                "," + format_double(m.margin2) + "," + format_double(m.margin3);
        out << line << '\n';
    }
}

void write_classify_csv(std::ostream& out, const std::vector<ClassifyRecord>& rs) {
    out << "index,inside_at_start,start_margin,entered,entry_time,converged,residual,dispersing,error\n";
    for (const auto& r : rs)
        out << r.index << ',' << r.inside_at_start << ',' << format_double(r.start_margin) << ',' << r.entered << ','
            << format_double(r.entry_time) << ',' << r.converged << ',' << format_double(r.residual) << ','
            << r.dispersing << ',' << csv_quote(r.error) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& rs) {
    out << "b,deflection,deflection_exact,error,converged\n";
    for (const auto& r : rs)
        out << format_double(r.b) << ',' << format_double(r.deflection) << ',' << format_double(r.deflection_exact) << ','
            << format_double(r.error) << ',' << r.converged << '\n';
}

}  // namespace nbs
