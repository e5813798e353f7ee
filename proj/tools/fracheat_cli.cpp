#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "fracheat/constructions.hpp"
#include "fracheat/io.hpp"

using namespace fracheat;
using io::json;
namespace fs = std::filesystem;

namespace {

enum Status { Ok = 0, Usage = 2, Domain = 3, Certification = 4, NonConvergence = 5 };

struct Problem {
    int N = 3;
    double s = 0.5;
    double lambda = 0.5;
    double p = 2.0;

    void add_to(CLI::App* app, bool with_p = true) {
        app->add_option("--N", N, "dimension");
        app->add_option("--s", s, "fractional order in (0,1)");
        app->add_option("--lambda", lambda, "Hardy potential strength");
        if (with_p) app->add_option("--p", p, "reaction exponent");
    }
    ProblemParams params() const { return {N, s, lambda, p}; }
};

std::vector<double> geometric(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo * std::pow(hi / lo, double(i) / (n - 1)));
    return out;
}

std::vector<double> linear(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
}

/// Every option of the subcommand with its effective value, in declaration order.
json echo_options(CLI::App const* app) {
    json j = json::object();
    for (auto const* opt : app->get_options()) {
        if (opt->get_lnames().empty()) continue;
        std::string const name = opt->get_lnames().front();
        if (name == "help") continue;
        if (opt->count() > 0) {
            auto const& res = opt->results();
            std::string joined;
            for (std::size_t i = 0; i < res.size(); ++i) joined += (i ? " " : "") + res[i];
            j[name] = joined;
        } else if (opt->get_expected_max() == 0) {
            j[name] = "false";
        } else {
            j[name] = opt->get_default_str();
        }
    }
    return j;
}

/// key=value lines, accepted anywhere on the command line; keys already given on the command line are skipped so that flags win.
std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[++i];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
        else kept.push_back(args[i]);
    }
    if (path.empty()) return args;
    args = kept;
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    auto trim = [](std::string x) {
        auto const a = x.find_first_not_of(" \t\r");
        auto const b = x.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
    };
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        auto const eq = line.find('=');
        if (eq == std::string::npos) throw CLI::ParseError("config line without '=': " + line, CLI::ExitCodes::InvalidError);
        std::string key = trim(line.substr(0, eq));
        while (!key.empty() && key.front() == '-') key.erase(key.begin());
        std::string const value = trim(line.substr(eq + 1));
        std::string const flag = "--" + key;
        bool const given = std::any_of(args.begin(), args.end(), [&](std::string const& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
        if (!given) args.push_back(flag + "=" + value);
    }
    return args;
}

struct Context {
    fs::path out_dir;
    json provenance = json::object();
    std::vector<std::string> outputs;

    fs::path file(std::string const& name) {
        outputs.push_back(name);
        return out_dir / name;
    }
    void manifest(std::string const& command, CLI::App const* app) {
        io::RunManifest m;
        m.command = command;
        m.parameters = echo_options(app);
        m.provenance = provenance;
        m.outputs = outputs;
        io::write_manifest(out_dir, m);
    }
};

json profile_provenance(KernelProfile const& prof) {
    return {{"N", prof.N}, {"s", prof.s}, {"sigma_max", prof.sigma_max}, {"points", prof.sigma.size()}, {"mass", prof.mass}};
}

void print(json const& j) { std::cout << j.dump(2) << "\n"; }

// ----- datum -----

struct Datum {
    std::string kind = "gaussian";
    double amplitude = 1.0;
    double width = 1.0;
    int terms = 4;
    std::uint64_t seed = 1;

    void add_to(CLI::App* app) {
        app->add_option("--datum", kind, "gaussian, bump or random")->check(CLI::IsMember({"gaussian", "bump", "random"}));
        app->add_option("--amplitude", amplitude, "peak height");
        app->add_option("--width", width, "length scale");
        app->add_option("--terms", terms, "gaussians in a random datum");
        app->add_option("--seed", seed, "seed for random data");
    }

    RadialFunction build() const {
        if (!(amplitude >= 0.0) || !(width > 0.0)) throw DomainError("datum needs amplitude >= 0 and width > 0");
        double const a = amplitude, w = width;
        if (kind == "bump")
            return {[a, w](double r) { return r < w ? a * std::pow(1 - (r / w) * (r / w), 3) : 0.0; }, std::numeric_limits<double>::infinity(), w / 4, {w}};
        if (kind == "random") {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> coef(0.0, 1.0), scale(0.5, 2.0);
            std::vector<std::pair<double, double>> g;
            double total = 0.0;
            for (int k = 0; k < terms; ++k) {
                double const c = coef(rng);
                g.emplace_back(c, w * scale(rng));
                total += c;
            }
            if (!(total > 0.0)) throw DomainError("random datum needs at least one term");
            for (auto& [c, l] : g) c *= a / total;
            return {[g](double r) {
                        double v = 0.0;
                        for (auto const& [c, l] : g) v += c * std::exp(-(r / l) * (r / l));
                        return v;
                    },
                    std::numeric_limits<double>::infinity(), 0.5 * w};
        }
        return {[a, w](double r) { return a * std::exp(-(r / w) * (r / w)); }, std::numeric_limits<double>::infinity(), w};
    }
};

struct Run {
    double r_min = 1e-3, r_max = 1e4;
    int n = 301;
    double dt = 0.01, t_max = 10.0, threshold = 1e8, epsilon = -1.0;
    std::string formulation = "ground-state";
    bool no_reaction = false, dirichlet = false;

    void add_to(CLI::App* app) {
        app->add_option("--r-min", r_min, "innermost radius");
        app->add_option("--r-max", r_max, "outermost radius");
        app->add_option("--n", n, "radial nodes");
        app->add_option("--dt", dt, "initial time step");
        app->add_option("--t-max", t_max, "final time");
        app->add_option("--threshold", threshold, "blow-up threshold on the monitored norm");
        app->add_option("--epsilon", epsilon, "potential regularisation (negative: r-min)");
        app->add_option("--formulation", formulation, "direct or ground-state")->check(CLI::IsMember({"direct", "ground-state"}));
        app->add_flag("--no-reaction", no_reaction, "drop the u^p term");
        app->add_flag("--dirichlet", dirichlet, "zero exterior condition beyond r-max");
    }

    SolverConfig config(ProblemParams const& pp) const {
        SolverConfig c;
        c.params = pp;
        c.grid = RadialGeometry{r_min, r_max, n};
        c.dt_initial = dt;
        c.t_max = t_max;
        c.blowup_threshold = threshold;
        c.potential_epsilon = epsilon;
        c.formulation = formulation == "direct" ? Formulation::Direct : Formulation::GroundState;
        c.reaction = !no_reaction;
        c.boundary = dirichlet ? Boundary::Dirichlet : Boundary::FreeSpace;
        return c;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional heat equation with a Hardy potential: exponents, kernels, certificates and simulations"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();

    char const* env_dir = std::getenv("FRACHEAT_OUTPUT_DIR");
    std::string out_dir = env_dir && *env_dir ? env_dir : ".";
    std::string config_path;
    app.add_option("--output-dir", out_dir, "directory for artifacts (default $FRACHEAT_OUTPUT_DIR or .)");
    app.add_option("--config", config_path, "key=value file merged under the command-line flags");

    std::function<int()> action;
    Context ctx;

    // ----- exponents -----
    Problem ex;
    auto* exponents = app.add_subcommand("exponents", "print the exponent profile as JSON");
    ex.add_to(exponents, false);
    std::optional<double> ex_p;
    exponents->add_option("--p", ex_p, "also classify this reaction exponent");
    exponents->callback([&] {
        action = [&] {
            json j = io::to_json(exponent_profile(ex.N, ex.s, ex.lambda));
            if (ex_p) {
                j["p"] = *ex_p;
                try {
                    j["regime"] = to_string(classify_regime({ex.N, ex.s, ex.lambda, *ex_p}));
                } catch (AmbiguityError const&) {
                    j["regime"] = "ambiguous";
                }
            }
            print(j);
            ctx.manifest("exponents", exponents);
            return Ok;
        };
    });

    // ----- phase-diagram -----
    Problem ph;
    int ph_points = 100;
    auto* phase = app.add_subcommand("phase-diagram", "p_-, p_+ and F over a lambda grid in (0, Hardy constant]");
    ph.add_to(phase, false);
    phase->add_option("--points", ph_points, "lambda samples");
    phase->callback([&] {
        action = [&] {
            if (ph_points < 1) throw DomainError("--points must be positive");
            double const h = hardy_constant(ph.N, ph.s);
            std::vector<double> grid;
            for (int i = 1; i <= ph_points; ++i) grid.push_back(h * i / ph_points);
            std::ofstream out(ctx.file("phase_diagram.csv"));
            io::write_phase_table(out, phase_table(ph.N, ph.s, grid));
            ctx.provenance = {{"hardy_constant", h}};
            ctx.manifest("phase-diagram", phase);
            return Ok;
        };
    });

    // ----- kernel -----
    auto* kernel = app.add_subcommand("kernel", "self-similar profiles H");
    kernel->require_subcommand(1);
    int kb_N = 3, kb_points = 801;
    double kb_s = 0.5, kb_sigma = 50.0;
    std::string kb_name = "profile";
    auto* kbuild = kernel->add_subcommand("build", "tabulate H and H'");
    kbuild->add_option("--N", kb_N, "dimension");
    kbuild->add_option("--s", kb_s, "fractional order");
    kbuild->add_option("--sigma-max", kb_sigma, "table end");
    kbuild->add_option("--points", kb_points, "table nodes");
    kbuild->add_option("--name", kb_name, "basename of the .csv/.json pair");
    kbuild->callback([&] {
        action = [&] {
            auto const prof = build_profile(kb_N, kb_s, kb_sigma, kb_points);
            std::ofstream csv(ctx.file(kb_name + ".csv"));
            io::write_profile(csv, prof);
            auto const header = io::profile_header(prof);
            io::write_json(ctx.file(kb_name + ".json"), header);
            ctx.provenance = profile_provenance(prof);
            print(header);
            ctx.manifest("kernel-build", kbuild);
            return Ok;
        };
    });
    std::string kc_input;
    double kc_mass_tol = 1e-6, kc_envelope_max = std::numeric_limits<double>::infinity();
    auto* kcheck = kernel->add_subcommand("check", "validate a stored profile");
    kcheck->add_option("--input", kc_input, "basename of the .csv/.json pair (default <output-dir>/profile)");
    kcheck->add_option("--mass-tol", kc_mass_tol, "allowed |mass - 1|");
    kcheck->add_option("--envelope-max", kc_envelope_max, "largest acceptable envelope constant");
    kcheck->callback([&] {
        action = [&] {
            fs::path const base = kc_input.empty() ? ctx.out_dir / "profile" : fs::path(kc_input);
            std::ifstream hin(base.string() + ".json"), cin(base.string() + ".csv");
            if (!hin || !cin) throw DomainError("cannot read " + base.string() + ".{csv,json}");
            auto const header = json::parse(hin);
            auto const prof = io::read_profile(cin, header);
            json rep = {{"input", base.string()}};
            bool ok = true;
            try {
                double const C = check_envelope(prof);
                rep["envelope_constant"] = C;
                ok = ok && C <= kc_envelope_max;
            } catch (CorruptionError const& e) {
                rep["corruption"] = e.what();
                ok = false;
            }
            bool decreasing = true;
            for (std::size_t i = 1; i < prof.H.size(); ++i) decreasing = decreasing && prof.H[i] < prof.H[i - 1];
            rep["strictly_decreasing"] = decreasing;
            rep["mass"] = prof.mass;
            ok = ok && decreasing && std::abs(prof.mass - 1.0) <= kc_mass_tol;
            rep["pass"] = ok;
            print(rep);
            ctx.provenance = profile_provenance(prof);
            ctx.manifest("kernel-check", kcheck);
            return ok ? Ok : Certification;
        };
    });

    // ----- verify -----
    auto* verify = app.add_subcommand("verify", "numerical certificates");
    verify->require_subcommand(1);

    int vl_N = 3;
    double vl_s = 0.5, vl_alpha = 0.5, vl_tol = 1e-3;
    std::vector<double> vl_radii = {0.5, 1.0, 2.0};
    auto* lemma = verify->add_subcommand("lemma21", "(-Delta)^s |x|^{-(N-2s)/2 +- alpha} = lambda(alpha) |x|^{-2s} (same power)");
    lemma->add_option("--N", vl_N, "dimension");
    lemma->add_option("--s", vl_s, "fractional order");
    lemma->add_option("--alpha", vl_alpha, "exponent offset");
    lemma->add_option("--radii", vl_radii, "evaluation radii");
    lemma->add_option("--tol", vl_tol, "relative tolerance");
    lemma->callback([&] {
        action = [&] {
            double const err = verify_power_solution(vl_N, vl_s, vl_alpha, vl_radii);
            bool const ok = err <= vl_tol;
            print({{"lambda", lambda_of_alpha(vl_N, vl_s, vl_alpha)}, {"max_error", err}, {"tolerance", vl_tol}, {"pass", ok}});
            ctx.manifest("verify-lemma21", lemma);
            return ok ? Ok : Certification;
        };
    });

    Problem vp;
    std::vector<double> vp_eta = {1.0, 0.1};
    double vp_sigma = 50.0;
    int vp_points = 801, vp_radii = 20;
    auto* psi = verify->add_subcommand("psi-eta", "mass law and differential inequality of the test functions");
    vp.add_to(psi);
    psi->add_option("--eta", vp_eta, "eta values for the inequality");
    psi->add_option("--radii", vp_radii, "radii in [1e-2, 1e2]");
    psi->add_option("--sigma-max", vp_sigma, "profile table end");
    psi->add_option("--points", vp_points, "profile nodes");
    psi->callback([&] {
        action = [&] {
            auto const pp = vp.params();
            validate(pp);
            auto const prof = build_profile(pp.N, pp.s, vp_sigma, vp_points);
            double const mu = weight_exponent(pp);
            RadialFunction const one{[](double) { return 1.0; }, 0.0, 0.0};
            std::vector<double> x, y;
            for (int k = 0; k <= 10; ++k) {
                double const eta = std::pow(10.0, -2.0 + 0.2 * k);
                x.push_back(std::log(eta));
                y.push_back(std::log(psi_weighted_mass(one, {eta, mu}, prof)));
            }
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / x.size(), my += y[i] / y.size();
            double sxy = 0, sxx = 0;
            for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
            double const slope = sxy / sxx, expected = -mu / (2 * pp.s);
            bool ok = std::abs(slope - expected) <= 1e-2;
            auto const radii = geometric(1e-2, 1e2, vp_radii);
            std::ofstream out(ctx.file("psi_eta_inequality.csv"));
            io::CsvWriter csv(out, {"eta", "r", "margin", "scale"});
            double worst = std::numeric_limits<double>::infinity();
            for (double eta : vp_eta)
                for (auto const& smp : psi_eta_inequality({eta, mu}, pp, prof, radii)) {
                    csv.row(std::vector<double>{eta, smp.r, smp.margin, smp.scale});
                    worst = std::min(worst, smp.margin / smp.scale);
                }
            ok = ok && worst >= -1e-6;
            print({{"mass_slope", slope}, {"expected_slope", expected}, {"min_relative_margin", worst}, {"pass", ok}});
            ctx.provenance = profile_provenance(prof);
            ctx.manifest("verify-psi-eta", psi);
            return ok ? Ok : Certification;
        };
    });

    Problem vs;
    double vs_T = 1.0, vs_scale = 1.0, vs_t_max = 10.0, vs_sigma = 50.0;
    int vs_radii = 20, vs_times = 10, vs_points = 2001;
    bool vs_mixed = false;
    auto* super = verify->add_subcommand("supersolution", "pointwise residual of the self-similar supersolution");
    vs.add_to(super);
    super->add_option("--T", vs_T, "time shift");
    super->add_option("--a-scale", vs_scale, "multiplier applied to the chosen amplitude A");
    super->add_option("--radii", vs_radii, "radii in [1e-2, 1e2]");
    super->add_option("--times", vs_times, "times in [0, t-max]");
    super->add_option("--t-max", vs_t_max, "last sampled time");
    super->add_option("--sigma-max", vs_sigma, "profile table end");
    super->add_option("--points", vs_points, "profile nodes");
    super->add_flag("--with-mixed", vs_mixed, "also report the mixed term J");
    super->callback([&] {
        action = [&] {
            auto const pp = vs.params();
            validate(pp);
            auto const prof = build_profile(pp.N, pp.s, vs_sigma, vs_points);
            auto sp = choose_supersolution(pp, prof, vs_T);
            sp.A *= vs_scale;
            auto const rep = supersolution_residual(sp, pp, prof, geometric(1e-2, 1e2, vs_radii), linear(0.0, vs_t_max, vs_times), vs_mixed);
            std::ofstream out(ctx.file("supersolution_residual.csv"));
            io::CsvWriter csv(out, {"r", "t", "residual", "scale", "mixed"});
            for (auto const& smp : rep.samples) csv.row(std::vector<double>{smp.r, smp.t, smp.residual, smp.scale, smp.mixed});
            print({{"A", sp.A}, {"gamma", sp.gamma}, {"theta", sp.theta}, {"beta", sp.beta}, {"T", sp.T},
                   {"min_relative_residual", rep.min_relative}, {"certified", rep.certified}});
            ctx.provenance = profile_provenance(prof);
            ctx.manifest("verify-supersolution", super);
            return rep.certified ? Ok : Certification;
        };
    });

    Problem ve;
    double ve_amp = 10.0, ve_width = 1.0, ve_R = 2.0;
    auto* energy = verify->add_subcommand("energy", "negative-energy blow-up criterion for a cubic bump");
    ve.add_to(energy);
    energy->add_option("--amplitude", ve_amp, "bump height a in a(1-(r/w)^2)^3");
    energy->add_option("--width", ve_width, "bump radius w");
    energy->add_option("--R", ve_R, "ball radius containing the support");
    energy->callback([&] {
        action = [&] {
            Datum d;
            d.kind = "bump";
            d.amplitude = ve_amp;
            d.width = ve_width;
            auto const e = energy_blowup_criterion(d.build(), ve.params(), ve_R);
            print({{"holds", e.holds}, {"reaction_term", e.reaction_term}, {"quadratic_term", e.quadratic_term},
                   {"forecast_constant", e.forecast_constant}});
            ctx.manifest("verify-energy", energy);
            return e.holds ? Ok : Certification;
        };
    });

    Problem vc;
    vc.p = 1.4;
    std::optional<double> vc_m;
    double vc_kappa = 0.05;
    int vc_level = 3;
    auto* critical = verify->add_subcommand("critical-constants", "C1 and C3 at p = F with refinement check");
    vc.add_to(critical);
    critical->add_option("--m", vc_m, "integrability exponent (default p' - 0.1)");
    critical->add_option("--kappa", vc_kappa, "cutoff parameter");
    critical->add_option("--level", vc_level, "quadrature level");
    critical->callback([&] {
        action = [&] {
            auto const pp = vc.params();
            double const m = vc_m ? *vc_m : pp.p / (pp.p - 1) - 0.1;
            auto const c = critical_case_constants(pp, m, vc_kappa, vc_level);
            print({{"m", m}, {"C1", c.C1}, {"C3", c.C3}, {"C1_refined", c.C1_refined}, {"C3_refined", c.C3_refined},
                   {"change1", c.change1}, {"change3", c.change3}, {"stable", c.stable}});
            ctx.manifest("verify-critical-constants", critical);
            return c.stable ? Ok : Certification;
        };
    });

    // ----- simulate -----
    Problem sm;
    Datum sm_datum;
    Run sm_run;
    auto* simulate = app.add_subcommand("simulate", "one radial Cauchy run");
    sm.add_to(simulate);
    sm_datum.add_to(simulate);
    sm_run.add_to(simulate);
    simulate->callback([&] {
        action = [&] {
            auto const cfg = sm_run.config(sm.params());
            auto const rep = run(sm_datum.build(), cfg);
            std::ofstream out(ctx.file("trajectory.csv"));
            io::write_trajectory(out, rep);
            auto const record = io::verdict_record(rep, cfg);
            io::write_json(ctx.file("verdict.json"), record);
            ctx.provenance = {{"grid", record.at("config").at("grid")}, {"epsilon", rep.epsilon}, {"mu", rep.mu}};
            print(io::to_json(rep.verdict));
            ctx.manifest("simulate", simulate);
            return Ok;
        };
    });

    // ----- sweep -----
    int sw_N = 3, sw_p_count = 5, sw_l_count = 3;
    double sw_s = 0.5, sw_p_min = 1.1, sw_p_max = 2.5, sw_l_min = 0.1, sw_l_max = 0.6;
    unsigned sw_jobs = std::max(1u, std::thread::hardware_concurrency());
    Datum sw_datum;
    Run sw_run;
    auto* sweep = app.add_subcommand("sweep", "(p, lambda) grid of solver verdicts");
    sweep->add_option("--N", sw_N, "dimension");
    sweep->add_option("--s", sw_s, "fractional order");
    sweep->add_option("--p-min", sw_p_min, "smallest p");
    sweep->add_option("--p-max", sw_p_max, "largest p");
    sweep->add_option("--p-count", sw_p_count, "p samples");
    sweep->add_option("--lambda-min", sw_l_min, "smallest lambda");
    sweep->add_option("--lambda-max", sw_l_max, "largest lambda");
    sweep->add_option("--lambda-count", sw_l_count, "lambda samples");
    sweep->add_option("--jobs", sw_jobs, "worker threads")->check(CLI::PositiveNumber);
    sw_datum.add_to(sweep);
    sw_run.add_to(sweep);
    sweep->callback([&] {
        action = [&] {
            if (sw_p_count < 1 || sw_l_count < 1) throw DomainError("sweep counts must be positive");
            struct Cell {
                double lambda = 0.0, p = 0.0;
                std::string regime, verdict;
                double t_star = std::nan(""), t_end = 0.0;
            };
            std::vector<Cell> cells;
            for (double lam : linear(sw_l_min, sw_l_max, sw_l_count))
                for (double p : linear(sw_p_min, sw_p_max, sw_p_count)) {
                    Cell c;
                    c.lambda = lam;
                    c.p = p;
                    cells.push_back(c);
                }
            for (auto& c : cells) {
                validate(ProblemParams{sw_N, sw_s, c.lambda, c.p});
                try {
                    c.regime = to_string(classify_regime({sw_N, sw_s, c.lambda, c.p}));
                } catch (AmbiguityError const&) {
                    c.regime = "ambiguous";
                }
            }
            auto const datum = sw_datum.build();
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i; (i = next++) < cells.size();) {
                    auto& c = cells[i];
                    try {
                        auto const rep = run(datum, sw_run.config({sw_N, sw_s, c.lambda, c.p}));
                        c.verdict = to_string(rep.verdict.kind);
                        c.t_star = rep.verdict.t_star;
                        c.t_end = rep.verdict.t_end;
                    } catch (ConvergenceError const&) {
                        c.verdict = "non-converged";
                    }
                }
            };
            std::vector<std::thread> pool;
            for (unsigned k = 0; k < std::min<std::size_t>(sw_jobs, cells.size()); ++k) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
            std::ofstream out(ctx.file("sweep.csv"));
            io::CsvWriter csv(out, {"lambda", "p", "mu", "fujita", "p_plus", "regime", "verdict", "t_star", "t_end"});
            for (auto const& c : cells) {
                auto const e = exponent_profile(sw_N, sw_s, c.lambda);
                csv.row(std::vector<std::string>{io::num(c.lambda), io::num(c.p), io::num(e.mu), io::num(e.fujita), io::num(e.p_plus), c.regime,
                                                 c.verdict, io::num(c.t_star), io::num(c.t_end)});
            }
            ctx.manifest("sweep", sweep);
            return Ok;
        };
    });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = merge_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        if (argc == 1) std::cerr << app.help();
        return Usage;
    }

    try {
        ctx.out_dir = out_dir;
        fs::create_directories(ctx.out_dir);
        return action();
    } catch (ConvergenceError const& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return NonConvergence;
    } catch (std::domain_error const& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return Domain;
    } catch (AmbiguityError const& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return Domain;
    } catch (OutOfTableError const& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return Domain;
    } catch (CorruptionError const& e) {
        std::cerr << "corrupted data: " << e.what() << "\n";
        return Domain;
    } catch (json::exception const& e) {
        std::cerr << "malformed input: " << e.what() << "\n";
        return Domain;
    } catch (fs::filesystem_error const& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return Domain;
    }
}
