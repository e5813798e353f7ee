#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "exponents.hpp"
#include "kernel.hpp"
#include "solver.hpp"

namespace fracheat::io {

using nlohmann::json;

inline constexpr char const* tool_version = "0.3.0";

/// %.17g, enough for every double to read back unchanged.
inline std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), cols_(header.size()) {
        if (header.empty()) throw DomainError("csv header must not be empty");
        line(header);
    }

    void row(std::vector<double> const& values) {
        if (values.size() != cols_) throw DomainError("csv row width differs from the header");
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values) cells.push_back(num(v));
        line(cells);
    }

    void row(std::vector<std::string> const& cells) {
        if (cells.size() != cols_) throw DomainError("csv row width differs from the header");
        line(cells);
    }

private:
    void line(std::vector<std::string> const& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }
    std::ostream& out_;
    std::size_t cols_;
};

inline json to_json(ExponentProfile const& e) {
    return {{"N", e.N},
            {"s", e.s},
            {"lambda", e.lambda},
            {"hardy_constant", e.hardy_constant},
            {"alpha", e.alpha},
            {"mu", e.mu},
            {"mu_bar", e.mu_bar},
            {"p_minus", e.p_minus},
            {"p_plus", e.p_plus},
            {"fujita", e.fujita},
            {"sobolev_power", e.sobolev_power},
            {"a_Ns", e.a_Ns}};
}

inline json to_json(ProblemParams const& pp) { return {{"N", pp.N}, {"s", pp.s}, {"lambda", pp.lambda}, {"p", pp.p}}; }

inline void write_phase_table(std::ostream& out, PhaseTable const& table) {
    CsvWriter csv(out, {"lambda", "alpha", "mu", "p_minus", "p_plus", "fujita"});
    for (auto const& r : table.rows) csv.row(std::vector<double>{r.lambda, r.alpha, r.mu, r.p_minus, r.p_plus, r.fujita});
}

inline void write_profile(std::ostream& out, KernelProfile const& prof) {
    CsvWriter csv(out, {"sigma", "H", "Hprime"});
    for (std::size_t i = 0; i < prof.sigma.size(); ++i) csv.row(std::vector<double>{prof.sigma[i], prof.H[i], prof.Hprime[i]});
}

inline json profile_header(KernelProfile const& prof) {
    return {{"N", prof.N},
            {"s", prof.s},
            {"sigma_max", prof.sigma_max},
            {"points", prof.sigma.size()},
            {"mass", prof.mass},
            {"envelope_constant", check_envelope(prof)},
            {"tail_coefficient", fitted_envelope_coefficient(prof)},
            {"extension", "power envelope beyond sigma_max (values flagged as extended)"}};
}

/// Reads back the CSV written by write_profile; N and s come from the header record.
inline KernelProfile read_profile(std::istream& csv, json const& header) {
    KernelProfile prof;
    prof.N = header.at("N").get<int>();
    prof.s = header.at("s").get<double>();
    prof.sigma_max = header.at("sigma_max").get<double>();
    prof.mass = header.at("mass").get<double>();
    std::string line;
    if (!std::getline(csv, line) || line != "sigma,H,Hprime") throw CorruptionError("profile csv header missing");
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',')) throw CorruptionError("short profile row");
        prof.sigma.push_back(std::stod(a));
        prof.H.push_back(std::stod(b));
        prof.Hprime.push_back(std::stod(c));
    }
    if (prof.sigma.size() < 2) throw CorruptionError("profile csv has no rows");
    return prof;
}

inline void write_trajectory(std::ostream& out, TrajectoryReport const& rep) {
    CsvWriter csv(out, {"t", "weighted_mass", "critical_norm", "l2", "energy"});
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        csv.row(std::vector<double>{rep.times[i], rep.weighted_mass_series[i], rep.critical_norm_series[i], rep.l2_series[i],
                                    rep.energy_series[i]});
}

inline json to_json(SolverConfig const& c) {
    json j = {{"params", to_json(c.params)},
              {"formulation", to_string(c.formulation)},
              {"boundary", c.boundary == Boundary::FreeSpace ? "free-space" : "dirichlet"},
              {"potential_epsilon", c.epsilon()},
              {"dt_initial", c.dt_initial},
              {"dt_safety", c.dt_safety},
              {"t_max", c.t_max},
              {"blowup_threshold", c.blowup_threshold},
              {"reaction", c.reaction},
              {"snapshot_times", c.snapshot_times},
              {"max_halvings", c.max_halvings},
              {"max_steps", c.max_steps}};
    if (auto const* g = std::get_if<RadialGeometry>(&c.grid))
        j["grid"] = {{"kind", "radial"}, {"r_min", g->r_min}, {"r_max", g->r_max}, {"n", g->n}};
    else {
        auto const& b = std::get<UniformGrid>(c.grid);
        j["grid"] = {{"kind", "box"}, {"N", b.N}, {"L", b.L}, {"n", b.n}};
    }
    return j;
}

inline json to_json(Verdict const& v) {
    auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    return {{"verdict", to_string(v.kind)},
            {"t_star", finite(v.t_star)},
            {"t_end", v.t_end},
            {"fit_residual", finite(v.fit_residual)},
            {"fit_max_residual", finite(v.fit_max_residual)},
            {"reason", v.reason}};
}

inline json verdict_record(TrajectoryReport const& rep, SolverConfig const& cfg) {
    json j = to_json(rep.verdict);
    j["config"] = to_json(cfg);
    j["epsilon"] = rep.epsilon;
    j["mu"] = rep.mu;
    j["steps"] = rep.steps;
    return j;
}

struct RunManifest {
    std::string command;
    json parameters = json::object();
    json provenance = json::object();
    std::vector<std::string> outputs;

    json to_json() const {
        return {{"command", command}, {"tool_version", tool_version}, {"parameters", parameters}, {"provenance", provenance}, {"outputs", outputs}};
    }
};

inline void write_text(std::filesystem::path const& path, std::string const& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot open " + path.string() + " for writing");
    out << text;
}

inline void write_json(std::filesystem::path const& path, json const& j) { write_text(path, j.dump(2) + "\n"); }

inline std::filesystem::path write_manifest(std::filesystem::path const& dir, RunManifest const& m) {
    auto const path = dir / (m.command + ".manifest.json");
    write_json(path, m.to_json());
    return path;
}

} // namespace fracheat::io
