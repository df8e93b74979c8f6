#include "iuws/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"

#include "iuws/capwidth.hpp"
#include "iuws/config.hpp"
#include "iuws/elliptic.hpp"
#include "iuws/error.hpp"
#include "iuws/heat.hpp"
#include "iuws/montecarlo.hpp"
#include "iuws/report.hpp"
#include "iuws/spectrum.hpp"

namespace iuws {

using nlohmann::json;

namespace {

struct Flags {
    std::string config;
    double h = 0.0;
    double eta = 0.0;
    int jobs = 0;
    std::int64_t seed = -1;
    std::string out;
    bool no_timestamp = false;
    double length_scale = 1.0;
    std::string corpus = "standard";
    std::vector<std::string> only;
};

struct Output {
    json result = json::object();
    /// name -> field, written as <out>/<command>_<name>.csv
    std::vector<std::pair<std::string, ScalarField>> fields;
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Geodesic input lengths are given in units of the curvature radius L;
/// solvers work on the unit-curvature surface.
void apply_length_scale(RunConfig& cfg, double L)
{
    if (L == 1.0) return;
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw Error(ErrorKind::validation, "--length-scale must be positive");
    }
    if (!cfg.surface.is_hyperbolic()) {
        throw Error(ErrorKind::validation, "--length-scale applies to hyperbolic surfaces only");
    }
    const auto scale_shape = [&](DomainSpec& spec) {
        if (auto* b = std::get_if<GeodesicBall>(&spec.shape)) b->radius /= L;
        if (auto* a = std::get_if<Annulus>(&spec.shape)) {
            a->inner /= L;
            a->outer /= L;
        }
    };
    scale_shape(cfg.domain);
    if (cfg.sublevel) scale_shape(cfg.sublevel->base);
    cfg.capwidth.rmax /= L;
    cfg.capwidth.bisect_tol /= L;
    const double k = 1.0 / (L * L);
    for (double& t : cfg.survival.times) t *= k;
    cfg.survival.dt *= k;
    for (double& t : cfg.heat_kernel.times) t *= k;
    for (double& t : cfg.mc.times) t *= k;
    cfg.iu.t *= k;
}

Point deepest_point(const DomainSystem& sys)
{
    const std::vector<double> depth = depth_map(sys);
    const auto it = std::max_element(depth.begin(), depth.end());
    return sys.point(static_cast<std::size_t>(it - depth.begin()));
}

json point_json(Point p) { return json::array({p.u, p.v}); }

json system_json(const DomainSystem& sys)
{
    return {{"interior_nodes", sys.size()},
            {"grid", json::array({sys.nodes_u(), sys.nodes_v()})},
            {"measure", domain_measure(sys)}};
}

Output cmd_torsion(const RunConfig& cfg, double L)
{
    const SystemPtr sys = build_system(cfg);
    TorsionResult t = torsion(sys, cfg.tolerances.solver);
    for (double& v : t.field.values) v *= L * L;
    Output out;
    out.result = {{"sup", t.sup * L * L}, {"system", system_json(*sys)}};
    out.fields.emplace_back("torsion", std::move(t.field));
    return out;
}

Output cmd_eigen(const RunConfig& cfg, double L)
{
    const SystemPtr sys = build_system(cfg);
    SpectralResult e = principal_eigenpair(sys, cfg.tolerances.eigen);
    Output out;
    out.result = {{"lambda", e.lambda / (L * L)},
                  {"residual", e.residual},
                  {"iterations", e.iterations},
                  {"largest_component_only", e.largest_component_only},
                  {"system", system_json(*sys)}};
    out.fields.emplace_back("phi", std::move(e.phi));
    return out;
}

Output cmd_green(const RunConfig& cfg)
{
    const SystemPtr sys = build_system(cfg);
    const Point pole = cfg.green.pole.value_or(deepest_point(*sys));
    ScalarField g = green(sys, pole, cfg.tolerances.solver);
    Output out;
    out.result = {{"pole", point_json(pole)}, {"max", g.sup()}, {"system", system_json(*sys)}};
    out.fields.emplace_back("green", std::move(g));
    return out;
}

Output cmd_capwidth(const RunConfig& cfg, double L)
{
    const SystemPtr sys = build_system(cfg);
    const CapWidthResult w = cap_width(*sys, cfg.capwidth);
    Output out;
    out.result = to_json(w);
    for (const char* k : {"w", "lo", "hi"}) {
        if (out.result[k].is_number()) out.result[k] = out.result[k].get<double>() * L;
    }
    out.result["system"] = system_json(*sys);
    return out;
}

Output cmd_survival(const RunConfig& cfg, double L)
{
    const SystemPtr sys = build_system(cfg);
    const TorsionResult tor = torsion(sys, cfg.tolerances.solver);
    const SpectralResult eig = principal_eigenpair(sys, cfg.tolerances.eigen);
    double dt = cfg.survival.dt;
    if (dt <= 0.0) {
        double t_min = 0.0;
        for (double t : cfg.survival.times) {
            if (t > 0.0) {
                t_min = t;
                break;
            }
        }
        if (t_min > 0.0) dt = decay_resolving_dt(*sys, t_min, eig.lambda);
    }
    const HeatRun run = survival(sys, cfg.survival.times, dt, cfg.survival.scheme);
    const auto upper = survival_upper_bound_check(run, 2.0, tor.sup);
    const auto lower = survival_lower_bound_check(run, eig.lambda, 0.02);

    json rows = json::array();
    for (std::size_t q = 0; q < run.times.size(); ++q) {
        rows.push_back({{"t", run.times[q] * L * L},
                        {"pi", run.sup[q]},
                        {"integral", run.integral[q] * L * L},
                        {"upper_bound", upper[q].bound},
                        {"upper_pass", upper[q].pass},
                        {"lower_bound", lower[q].bound},
                        {"lower_pass", lower[q].pass}});
    }
    Output out;
    out.result = {{"dt", run.dt * L * L},
                  {"scheme", to_string(run.scheme)},
                  {"torsion_sup", tor.sup * L * L},
                  {"lambda", eig.lambda / (L * L)},
                  {"rows", rows},
                  {"system", system_json(*sys)}};
    for (std::size_t q = 0; q < run.times.size(); ++q) {
        std::ostringstream name;
        name << "t" << run.times[q] * L * L;
        out.fields.emplace_back(name.str(), run.states[q]);
    }
    return out;
}

Output cmd_heat_kernel(const RunConfig& cfg, double L)
{
    const SystemPtr sys = build_system(cfg);
    const Point x = cfg.heat_kernel.source.value_or(deepest_point(*sys));
    HeatRun run = heat_kernel_columns(sys, x, cfg.heat_kernel.times);
    json rows = json::array();
    Output out;
    for (std::size_t q = 0; q < run.times.size(); ++q) {
        ScalarField f = run.states[q];
        for (double& v : f.values) v /= L * L;
        rows.push_back({{"t", run.times[q] * L * L},
                        {"max", run.sup[q] / (L * L)},
                        {"integral", run.integral[q]}});
        std::ostringstream name;
        name << "t" << run.times[q] * L * L;
        out.fields.emplace_back(name.str(), std::move(f));
    }
    out.result = {{"source", point_json(x)},
                  {"dt", run.dt * L * L},
                  {"rows", rows},
                  {"system", system_json(*sys)}};
    return out;
}

Output cmd_iu_check(const RunConfig& cfg, double L)
{
    const SystemPtr sys = build_system(cfg);
    const SpectralResult eig = principal_eigenpair(sys, cfg.tolerances.eigen);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(sys->size()) - 1);
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs;
    for (int q = 0; q < cfg.iu.pairs; ++q) pairs.emplace_back(pick(rng), pick(rng));
    const IuRatio ratio = iu_ratio(sys, eig, cfg.iu.t, pairs);

    const Point pole = cfg.iu.pole.value_or(deepest_point(*sys));
    const ScalarField g = green(sys, pole, cfg.tolerances.solver);
    const IuIntegral integral = iu_integral(sys, g, cfg.iu.tau, cfg.iu.samples, cfg.capwidth);

    json widths = json::array();
    json partials = json::array();
    json exhausted = json::array();
    for (std::size_t j = 0; j < integral.widths.size(); ++j) {
        widths.push_back(number(integral.widths[j] * L));
        partials.push_back(number(integral.partials[j] * L * L));
        exhausted.push_back(static_cast<bool>(integral.resolution_exhausted[j]));
    }
    Output out;
    out.result = {
        {"t", cfg.iu.t * L * L},
        {"ratio",
         {{"min", number(ratio.min)},
          {"max", number(ratio.max)},
          {"spread", number(ratio.spread)},
          {"used", ratio.used},
          {"skipped", ratio.skipped}}},
        {"integral",
         {{"pole", point_json(pole)},
          {"tau", integral.tau},
          {"tau_rule", cfg.iu.tau > 0.0 ? "given" : "half of max G"},
          {"value", number(integral.value * L * L)},
          {"infinite", integral.infinite},
          {"thresholds", integral.thresholds},
          {"widths", widths},
          {"partials", partials},
          {"resolution_exhausted", exhausted}}},
        {"system", system_json(*sys)}};
    return out;
}

Output cmd_mc(const RunConfig& cfg, double L)
{
    if (cfg.sublevel) {
        throw Error(ErrorKind::validation, "random walks need a closed-form domain, not sublevel");
    }
    const SystemPtr sys = build_system(cfg);
    const Point x = cfg.mc.start.value_or(deepest_point(*sys));
    WalkConfig walk;
    walk.step = cfg.mc.step > 0.0 ? cfg.mc.step : 0.5 * cfg.h;
    walk.paths = cfg.mc.paths;
    walk.seed = cfg.seed;
    walk.max_time = cfg.mc.times.back() > 0.0 ? cfg.mc.times.back() : 1.0;
    validate(walk, cfg.h);
    const auto est = mc_survival_curve(cfg.surface, cfg.domain, x, cfg.mc.times, walk);

    const auto node = sys->nearest_node(x);
    if (!node || !sys->is_interior(*node)) {
        throw Error(ErrorKind::invalid_start, "walk start does not snap to an interior node");
    }
    const auto k = static_cast<std::size_t>(sys->unknown(*node));
    std::vector<double> positive;
    for (double t : cfg.mc.times) {
        if (t > 0.0) positive.push_back(t);
    }
    const HeatRun pde = survival(sys, positive);

    json rows = json::array();
    std::size_t p = 0;
    for (const McEstimate& e : est) {
        double ref = 1.0;
        if (e.t > 0.0) ref = pde.states[p++].values[k];
        const double n = static_cast<double>(walk.paths);
        const double se =
            std::max({e.stderr_, std::sqrt(std::max(0.0, ref * (1.0 - ref)) / n), 1.0 / n});
        rows.push_back({{"t", e.t * L * L},
                        {"estimate", e.estimate},
                        {"stderr", e.stderr_},
                        {"pde", ref},
                        {"z", (e.estimate - ref) / se}});
    }
    Output out;
    out.result = {{"start", point_json(x)},
                  {"step", walk.step},
                  {"paths", walk.paths},
                  {"rows", rows},
                  {"system", system_json(*sys)}};
    return out;
}

void write_csv(const std::filesystem::path& path, const ScalarField& f)
{
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::validation, "cannot write " + path.string());
    os << "x,y,value\n" << std::setprecision(17);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        const Point p = f.system->point(k);
        os << p.u << ',' << p.v << ',' << f.values[k] << '\n';
    }
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::validation, "cannot write " + path.string());
    os << text << '\n';
}

int execute(const std::string& command, const Flags& flags, std::ostream& out, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    int jobs = flags.jobs;
    if (jobs <= 0) {
        if (const char* env = std::getenv("IUWS_JOBS")) jobs = std::atoi(env);
    }
    if (jobs > 0) omp_set_num_threads(jobs);

    if (command == "verify") {
        VerifyOptions opts;
        if (flags.h > 0.0) opts.h = flags.h;
        opts.corpus = flags.corpus;
        if (flags.seed >= 0) opts.seed = static_cast<std::uint64_t>(flags.seed);
        opts.only = flags.only;
        opts.progress = [&](const CheckRecord& r) {
            err << (r.skipped ? "SKIP " : r.pass ? "PASS " : "FAIL ") << r.id << " [" << r.anchor
                << "]";
            if (r.skipped) err << " " << r.skip_reason;
            err << std::endl;
        };
        const VerificationReport report = run_verify(opts);
        const std::string text = to_json(report, !flags.no_timestamp).dump(2);
        out << text << std::endl;
        if (!flags.out.empty()) {
            std::filesystem::create_directories(flags.out);
            write_text(std::filesystem::path(flags.out) / "verify.json", text);
        }
        return report.all_pass() ? exit_code::ok : exit_code::verify_failed;
    }

    if (flags.config.empty()) throw Error(ErrorKind::validation, command + " needs --config");
    RunConfig cfg = load_config(flags.config);
    if (flags.h > 0.0) cfg.h = flags.h;
    if (flags.eta > 0.0) {
        if (!(flags.eta < 1.0)) throw Error(ErrorKind::validation, "eta must lie in (0, 1)");
        cfg.eta = flags.eta;
        cfg.capwidth.eta = flags.eta;
    }
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (!flags.out.empty()) cfg.output.dir = flags.out;
    const RunConfig as_given = cfg;
    const double L = flags.length_scale;
    apply_length_scale(cfg, L);

    Output result;
    if (command == "torsion") result = cmd_torsion(cfg, L);
    else if (command == "eigen") result = cmd_eigen(cfg, L);
    else if (command == "green") result = cmd_green(cfg);
    else if (command == "capwidth") result = cmd_capwidth(cfg, L);
    else if (command == "survival") result = cmd_survival(cfg, L);
    else if (command == "heat-kernel") result = cmd_heat_kernel(cfg, L);
    else if (command == "iu-check") result = cmd_iu_check(cfg, L);
    else if (command == "mc") result = cmd_mc(cfg, L);
    else throw Error(ErrorKind::validation, "unknown subcommand " + command);

    json doc = {{"command", command},
                {"config", to_json(as_given)},
                {"length_scale", L},
                {"result", result.result}};
    if (!flags.no_timestamp) doc["runtime_seconds"] = seconds_since(t0);
    const std::string text = doc.dump(2);
    out << text << std::endl;

    if (!cfg.output.dir.empty()) {
        const std::filesystem::path dir(cfg.output.dir);
        std::filesystem::create_directories(dir);
        write_text(dir / (command + ".json"), text);
        if (cfg.output.fields) {
            for (const auto& [name, field] : result.fields) {
                write_csv(dir / (command + "_" + name + ".csv"), field);
            }
        }
    }
    return exit_code::ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"iuws: spectral geometry workbench for Euclidean and hyperbolic domains", "iuws"};
    app.set_help_flag("--help", "print this help");
    app.require_subcommand(1, 1);
    Flags flags;
    std::string command;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--h", flags.h, "grid spacing (overrides the config)");
        sub->add_option("--jobs", flags.jobs, "worker threads (fallback: IUWS_JOBS)");
        sub->add_option("--seed", flags.seed, "random seed (overrides the config)");
        sub->add_option("--out", flags.out, "directory for JSON and CSV output");
        sub->add_flag("--no-timestamp", flags.no_timestamp, "omit runtimes from the report");
        sub->callback([&command, sub] { command = sub->get_name(); });
    };

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"torsion", "torsion function and its supremum"},
        {"eigen", "bottom of the spectrum and principal eigenfunction"},
        {"green", "Green function with a pole"},
        {"capwidth", "capacitary width"},
        {"survival", "survival probability and its spectral bounds"},
        {"heat-kernel", "heat kernel columns"},
        {"iu-check", "intrinsic ultracontractivity ratio and integral"},
        {"mc", "random-walk survival against the heat solver"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config, "run configuration (JSON)")->required();
        sub->add_option("--eta", flags.eta, "capacity fraction eta in (0, 1)");
        sub->add_option("--length-scale", flags.length_scale,
                        "curvature radius of the hyperbolic surface in input units");
        add_common(sub);
    }
    CLI::App* verify = app.add_subcommand("verify", "run the property suite on a corpus");
    verify->add_option("--corpus", flags.corpus, "'standard' or a directory of configs");
    verify->add_option("--only", flags.only, "run checks whose id starts with these prefixes");
    add_common(verify);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help() << std::flush;
        return exit_code::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All) << std::flush;
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "iuws: " << e.what() << "\n\n" << app.help() << std::flush;
        return exit_code::validation;
    }

    try {
        return execute(command, flags, out, err);
    } catch (const Error& e) {
        err << "iuws " << command << ": " << to_string(e.kind()) << ": " << e.what() << std::endl;
        return e.is_solver_failure() ? exit_code::solver : exit_code::validation;
    } catch (const std::exception& e) {
        err << "iuws " << command << ": " << e.what() << std::endl;
        return exit_code::validation;
    }
}

int run(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace iuws
