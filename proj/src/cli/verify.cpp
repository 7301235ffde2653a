#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>

#include <CLI11.hpp>

#include "plap/assembly.hpp"
#include "plap/cli.hpp"
#include "plap/csv_io.hpp"
#include "plap/error.hpp"
#include "plap/parallel.hpp"
#include "plap/radial_barrier.hpp"

namespace plap::cli {

using json_io::json;
using json_io::number;

namespace {

DomainConfig default_verify_domain() {
    DomainConfig d;
    d.punctures = {{{-1.0, 0.0}, -1.0}, {{1.0, 0.0}, 1.0}};
    d.hole_radius = 0.25;
    d.outer_radius = 3.0;
    d.outer_value = 0.0;
    d.spacing = 0.1;
    return d;
}

struct Suite {
    json checks = json::array();
    bool failed = false;

    void record(const std::string& name, const std::string& status, json details) {
        details["name"] = name;
        details["status"] = status;
        if (status == "fail") failed = true;
        std::cout << status << ' ' << name;
        if (details.contains("message")) std::cout << ": " << details["message"].get<std::string>();
        std::cout << '\n';
        checks.push_back(details);
    }

    void skip(const std::string& name, const std::string& why) {
        std::cerr << "plap: warning: skipping " << name << ": " << why << '\n';
        record(name, "skipped", {{"message", why}});
    }
};

void check_damascelli(Suite& suite, const OperatorSpec& spec, const CheckSettings& ck, std::uint64_t seed) {
    if (spec.p() < 2.0) {
        suite.skip("damascelli", "requires p >= 2, got p = " + csv::format_double(spec.p()));
        return;
    }
    try {
        const auto rep = verify_damascelli(spec, ck.damascelli_samples, seed);
        const bool ok = rep.violations == 0 && std::isfinite(rep.c1_est) && std::isfinite(rep.c2_est) &&
                        rep.c2_est > 0.0 && rep.c1_est >= rep.c2_est;
        suite.record("damascelli", ok ? "pass" : "fail", {{"report", json_io::to_json(rep)}});
    } catch (const VerificationError& e) {
        suite.record("damascelli", "fail", {{"message", e.what()}});
    }
}

void check_envelope(Suite& suite, const OperatorSpec& spec, std::uint64_t seed) {
    const double s = spec.p() > spec.n() ? 0.0 : 1.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> loga(-2.0, 2.0), logr(-2.0, 2.0);
    int violations = 0;
    for (int k = 0; k < 200; ++k) {
        const double a = std::pow(10.0, loga(rng));
        const double r = s + std::pow(10.0, logr(rng));
        const double v = radial_integral(spec, a, s, r);
        const auto env = envelope_bounds(spec, a, s, r);
        // The envelopes coincide with v for constant A; allow the quadrature
        // tolerance.
        const double slack = 1e-11 * std::abs(v);
        if (!(env.lower - slack <= v && v <= env.upper + slack)) ++violations;
    }
    suite.record("radial_envelope", violations == 0 ? "pass" : "fail",
                 {{"samples", 200}, {"s", number(s)}, {"violations", violations}});
}

void check_gradient(Suite& suite, const OperatorSpec& spec, const Mesh& mesh, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    auto values = mesh.initial_values(0.0);
    for (int k : mesh.free_nodes()) values[k] = val(rng);
    const auto g = assemble_gradient(mesh, spec, values);
    std::uniform_int_distribution<std::size_t> pick(0, mesh.num_free() - 1);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const std::size_t k = pick(rng);
        const int node = mesh.free_nodes()[k];
        const double step = 1e-5;
        auto plus = values, minus = values;
        plus[node] += step;
        minus[node] -= step;
        const double fd = (assemble_energy(mesh, spec, plus) - assemble_energy(mesh, spec, minus)) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - g[k]) / std::max(std::abs(g[k]), 1e-12));
    }
    suite.record("gradient_fd", worst <= 1e-6 ? "pass" : "fail", {{"max_relative_error", number(worst)}});
}

void check_solve(Suite& suite, const OperatorSpec& spec, const DomainConfig& domain, const SolverParams& params,
                 double tol) {
    auto mesh = std::make_shared<const Mesh>(build_mesh(domain));
    const auto sol = solve(mesh, spec, params);
    const auto mp = max_principle_report(sol);
    suite.record("max_principle", sol.converged && mp.violation <= tol ? "pass" : "fail",
                 {{"converged", sol.converged}, {"iterations", sol.iterations}, {"report", json_io::to_json(mp)}});

    DomainConfig flat = domain;
    for (auto& pc : flat.punctures) pc.value = 0.0;
    flat.outer_value = 0.0;
    ContinuationPlan plan;
    plan.base = flat;
    plan.r_schedule = {flat.hole_radius};
    plan.R_schedule = {flat.outer_radius};
    plan.h_rule.fixed = flat.spacing;
    plan.probe_region.lo = plan.probe_region.hi = {0.0, 0.5 * flat.outer_radius};
    plan.probe_region.samples_per_axis = 1;
    try {
        const auto rep = liouville_check(plan, spec, params, 0.0);
        suite.record("liouville", rep.passed ? "pass" : "fail", {{"report", json_io::to_json(rep)}});
    } catch (const ConfigError& e) {
        suite.skip("liouville", e.what());
    }
}

}  // namespace

int cmd_verify(const RunConfig& cfg, const Options& opt) {
    Suite suite;
    std::optional<OperatorSpec> spec;
    try {
        spec = cfg.make_spec();
        suite.record("operator", "pass", {{"operator", json_io::to_json(*spec)}});
    } catch (const HypothesisError& e) {
        suite.record("operator", "fail", {{"hypothesis", e.hypothesis()}, {"message", e.what()}});
    }

    if (spec) {
        check_damascelli(suite, *spec, cfg.checks, opt.seed);
        check_envelope(suite, *spec, opt.seed);
        const DomainConfig domain = cfg.domain ? *cfg.domain : default_verify_domain();
        if (spec->p() < 2.0) {
            suite.skip("gradient_fd", "solver checks require p >= 2");
            suite.skip("max_principle", "solver checks require p >= 2");
            suite.skip("liouville", "solver checks require p >= 2");
        } else {
            const Mesh mesh = build_mesh(domain);
            check_gradient(suite, *spec, mesh, opt.seed);
            check_solve(suite, *spec, domain, cfg.solver, cfg.checks.max_principle_tol);
        }
    }

    if (cfg.outputs.wants("report")) {
        auto dir = opt.out ? *opt.out : cfg.outputs.dir;
        std::filesystem::create_directories(dir);
        std::ofstream out(dir / "verify.json", std::ios::binary | std::ios::trunc);
        json j = {{"config", resolved_json(cfg)}, {"checks", suite.checks}, {"passed", !suite.failed}};
        out << j.dump(2) << '\n';
    }
    return suite.failed ? kVerificationFailure : kSuccess;
}

int run(int argc, char** argv) {
    CLI::App app{"Numerical experiments for p-Laplacian type equations in punctured planar domains"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path, out_dir;
    int threads = 0;
    Options opt;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (overrides outputs.dir)");
    app.add_option("--threads", threads, "OpenMP thread count (0 keeps the runtime default)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", opt.seed, "Seed for sampled checks");
    app.add_flag("--trace", opt.trace, "Write the solver trace as CSV");

    auto* radial = app.add_subcommand("radial", "Tabulate the radial barrier and its envelopes");
    auto* solve_cmd = app.add_subcommand("solve", "Solve the Dirichlet problem on one punctured domain");
    auto* cont = app.add_subcommand("continue", "Run the hole/outer radius continuation");
    auto* fig1 = app.add_subcommand("figure1", "Reproduce the two-puncture example and its profiles");
    auto* verify = app.add_subcommand("verify", "Run the property checks of every module");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        if (threads > 0) parallel::set_num_threads(threads);
        if (out_dir) opt.out = std::filesystem::path(*out_dir);

        json j = json::object();
        if (config_path) {
            std::ifstream in(*config_path);
            try {
                j = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ConfigError("malformed JSON in " + *config_path + ": " + e.what());
            }
        }
        if (fig1->parsed()) {
            json merged = figure1_defaults();
            merged.merge_patch(j);
            j = merged;
        }
        const RunConfig cfg = parse_run_config(j);

        if (radial->parsed()) return cmd_radial(cfg, opt);
        if (solve_cmd->parsed()) return cmd_solve(cfg, opt);
        if (cont->parsed()) return cmd_continue(cfg, opt);
        if (fig1->parsed()) return cmd_figure1(cfg, opt);
        if (verify->parsed()) return cmd_verify(cfg, opt);
    } catch (const ConfigError& e) {
        std::cerr << "plap: configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const VerificationError& e) {
        std::cerr << "plap: verification failed: " << e.what() << '\n';
        return kVerificationFailure;
    } catch (const Error& e) {
        std::cerr << "plap: solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const json::exception& e) {
        std::cerr << "plap: configuration error: " << e.what() << '\n';
        return kConfigError;
    }
    return kConfigError;
}

}  // namespace plap::cli
