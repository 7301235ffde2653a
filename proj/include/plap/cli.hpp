#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "plap/continuation.hpp"
#include "plap/json_io.hpp"
#include "plap/solver.hpp"

namespace plap::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kSolverFailure = 3, kVerificationFailure = 4 };

struct Outputs {
    std::filesystem::path dir = "out";
    /// Subset of heatmap, profiles, trace, report, mesh.
    std::set<std::string> artifacts{"heatmap", "profiles", "report"};

    bool wants(const std::string& artifact) const { return artifacts.count(artifact) > 0; }
};

/// Parameters of the radial subcommand. The r grid is either explicit or
/// `count` log-spaced radii on [r_min, r_max].
struct RadialSettings {
    double a = 1.0;
    double s = 0.0;
    std::vector<double> r_values;
    double r_min = 1e-3;
    double r_max = 1e3;
    int count = 50;

    std::vector<double> grid() const;
};

/// Tolerances and parameters of the post-solve checks.
struct CheckSettings {
    double max_principle_tol = 1e-8;
    /// Sandwich budget in units of the final spacing h.
    double sandwich_budget = 5.0;
    std::optional<double> tail_U_radius;
    std::vector<double> tail_R_list;
    /// Regression bound I(R_max) <= c_check (sup |u|)^p, reported when set.
    std::optional<double> c_check;
    /// Far-field ring [inner, outer]; defaults to [R - 1, R].
    std::optional<std::pair<double, double>> far_field_ring;
    std::optional<double> far_field_bound;
    std::int64_t damascelli_samples = 100000;
};

struct RunConfig {
    json_io::json operator_block = json_io::json::object();
    std::optional<DomainConfig> domain;
    SolverParams solver;
    std::optional<json_io::json> continuation_block;
    Outputs outputs;
    RadialSettings radial;
    std::vector<double> profiles{0.0, 1.0, 2.0};
    CheckSettings checks;

    /// Validates the operator block; throws HypothesisError on failure.
    OperatorSpec make_spec() const;
    const DomainConfig& require_domain() const;
    ContinuationPlan make_plan() const;
};

RunConfig parse_run_config(const json_io::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Resolved configuration echoed into reports. The operator block is echoed
/// as given when it does not validate.
json_io::json resolved_json(const RunConfig& cfg);

/// Configuration of the two-puncture example, before overrides.
json_io::json figure1_defaults();

struct Options {
    std::optional<std::filesystem::path> out;
    std::uint64_t seed = 11;
    bool trace = false;
};

int cmd_radial(const RunConfig& cfg, const Options& opt);
int cmd_solve(const RunConfig& cfg, const Options& opt);
int cmd_continue(const RunConfig& cfg, const Options& opt);
int cmd_figure1(const RunConfig& cfg, const Options& opt);
int cmd_verify(const RunConfig& cfg, const Options& opt);

/// Entry point of the plap executable; returns the process exit code.
int run(int argc, char** argv);

}  // namespace plap::cli
