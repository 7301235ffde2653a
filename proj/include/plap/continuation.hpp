#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plap/error.hpp"
#include "plap/operator_model.hpp"
#include "plap/punctured_mesh.hpp"
#include "plap/solver.hpp"

namespace plap {

/// Grid spacing as a function of (r, R): the fixed value when set, otherwise
/// min(r * r_fraction, R / n_max).
struct HRule {
    std::optional<double> fixed;
    double r_fraction = 1.0 / 3.0;
    int n_max = 160;

    double spacing(double r, double R) const;
};

enum class Traversal {
    /// Tighten r and enlarge R together; the shorter schedule repeats its
    /// last entry.
    Diagonal,
    /// Every r for the first R, then every r for the next R, and so on.
    Nested,
};

/// Axis-aligned box sampled on a fixed 10 x 10 lattice.
struct ProbeRegion {
    Vec2 lo{-2.0, 0.5};
    Vec2 hi{2.0, 2.0};
    int samples_per_axis = 10;

    std::vector<Vec2> points() const;
};

struct ContinuationPlan {
    DomainConfig base;
    std::vector<double> r_schedule;
    std::vector<double> R_schedule;
    ProbeRegion probe_region;
    HRule h_rule;
    Traversal traversal = Traversal::Diagonal;

    /// (r, R) pairs in solve order.
    std::vector<std::pair<double, double>> stages() const;
    DomainConfig stage_config(double r, double R) const;
    void validate() const;
};

struct StageResult {
    double r = 0.0;
    double R = 0.0;
    double h = 0.0;
    DomainConfig config;
    DiscreteSolution solution;
    std::vector<double> probe_values;
    /// sup over the probe lattice of |u_current - u_previous|; NaN on the
    /// first stage.
    double probe_delta = std::numeric_limits<double>::quiet_NaN();
};

/// Raised when a stage fails; the stages completed before it are kept.
class ContinuationError : public SolverError {
public:
    ContinuationError(const std::string& what, std::vector<StageResult> partial)
        : SolverError(what), partial_(std::move(partial)) {}

    const std::vector<StageResult>& partial() const noexcept { return partial_; }

private:
    std::vector<StageResult> partial_;
};

/// Solve every stage of the plan, warm-starting each from the previous one.
/// The first stage runs the solver's p-continuation from a cold start.
std::vector<StageResult> run_continuation(const ContinuationPlan& plan, const OperatorSpec& spec,
                                          const SolverParams& params);

/// Values of `sol` on `mesh` for a warm start: bilinear interpolation over the
/// active corners of the enclosing cell, falling back to the nearest hole's
/// value inside old holes and to `outer_value` beyond the old grid.
std::vector<double> transfer_values(const DiscreteSolution& sol, const DomainConfig& old_cfg, const Mesh& mesh);

struct SandwichReport {
    double r0 = 0.0;
    std::vector<double> a;
    /// max over nodes and i of psi_i^- - u, and of u - psi_i^+ (may be negative).
    double lower = 0.0;
    double upper = 0.0;
    /// max(lower, upper, 0)
    double max_violation = 0.0;
};

/// Compare u against psi_i^{+-} = m_i +- v_{a_i}(|x - x_i|) with a_i chosen so
/// that v_{a_i}(r0) >= max(M - m_i, m_i - m). The default r0 is the largest
/// radius keeping every other boundary component at distance >= r0 from x_i.
SandwichReport barrier_sandwich_check(const DiscreteSolution& sol, const OperatorSpec& spec,
                                      const DomainConfig& cfg, std::optional<double> r0 = std::nullopt);

/// I(R) = sum over triangles with centroid in B_R minus B_U of area |grad u|^p.
std::vector<double> lp_gradient_tail(const DiscreteSolution& sol, const OperatorSpec& spec, double U_radius,
                                     const std::vector<double>& R_list);

struct LiouvilleReport {
    bool passed = false;
    double c = 0.0;
    std::vector<double> stage_sup_deviation;
    double max_deviation = 0.0;
};

/// Runs the plan and checks sup |u - c| <= 10 grad_tol at every stage.
LiouvilleReport liouville_check(const ContinuationPlan& plan, const OperatorSpec& spec, const SolverParams& params,
                                double c);

}  // namespace plap
