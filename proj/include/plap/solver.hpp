#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plap/error.hpp"
#include "plap/operator_model.hpp"
#include "plap/punctured_mesh.hpp"

namespace plap {

struct LineSearchParams {
    double backtrack = 0.5;
    double sufficient_decrease = 1e-4;
    int max_steps = 60;
};

struct SolverParams {
    /// Absolute inf-norm stopping threshold on the energy gradient. When unset
    /// the threshold is grad_tol_relative * (1 + |E|), evaluated each step.
    std::optional<double> grad_tol;
    double grad_tol_relative = 1e-10;
    int max_iter = 50000;
    /// Exponents solved in turn on a cold start, each warm-starting the next.
    /// Empty selects 2, 3, ..., floor(p), p.
    std::vector<double> p_continuation;
    /// Intermediate continuation stages stop at this multiple of the tolerance.
    double stage_tol_factor = 1e4;
    LineSearchParams line_search;
    /// Number of correction pairs kept by the limited-memory update.
    int memory = 12;
    /// Scale the initial inverse-Hessian guess by the Hessian diagonal.
    bool diagonal_scaling = true;
    int diagonal_refresh = 10;

    void validate(double target_p) const;
    std::vector<double> resolved_continuation(double target_p) const;
};

struct TraceEntry {
    int iteration = 0;
    double energy = 0.0;
    double grad_norm = 0.0;
    double p = 0.0;
};

/// Nodal values over the whole grid (NaN on EXCLUDED nodes) plus solver
/// diagnostics. Dirichlet nodes hold exactly their prescribed values.
struct DiscreteSolution {
    std::shared_ptr<const Mesh> mesh;
    std::vector<double> values;
    double energy = 0.0;
    double grad_inf_norm = 0.0;
    /// Threshold that applied at the final check.
    double grad_tol = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<TraceEntry> trace;
};

/// A solve aborted by a failed line search; keeps the iterate and trace
/// reached so far.
class SolveFailure : public SolverError {
public:
    SolveFailure(const std::string& what, DiscreteSolution partial)
        : SolverError(what), partial_(std::move(partial)) {}

    const DiscreteSolution& partial() const noexcept { return partial_; }

private:
    DiscreteSolution partial_;
};

/// Minimise the discrete p-Dirichlet energy over the FREE values by
/// limited-memory quasi-Newton descent with backtracking line search.
///
/// A cold start fills FREE nodes with the midpoint of the Dirichlet range and
/// runs the p-continuation schedule; an explicit initial guess (full nodal
/// vector, Dirichlet entries ignored) is solved directly at the target p.
/// Exhausting max_iter returns the last iterate with converged = false; a
/// failed line search throws SolveFailure.
DiscreteSolution solve(std::shared_ptr<const Mesh> mesh, const OperatorSpec& spec, const SolverParams& params,
                       std::optional<std::span<const double>> initial = std::nullopt);

struct MaxPrincipleReport {
    double min_u = 0.0;
    double max_u = 0.0;
    double min_dirichlet = 0.0;
    double max_dirichlet = 0.0;
    /// max(min_dirichlet - min_u, max_u - max_dirichlet, 0)
    double violation = 0.0;
};

MaxPrincipleReport max_principle_report(const DiscreteSolution& sol);

/// max over active nodes of sol1 - sol2; throws PreconditionError when the
/// solutions live on different meshes.
double compare_solutions(const DiscreteSolution& sol1, const DiscreteSolution& sol2);

/// Columns: iter, energy, grad_norm.
void write_trace_csv(const DiscreteSolution& sol, std::ostream& out);

/// Rows x, y, u over the non-EXCLUDED nodes in row-major grid order.
void write_heatmap_csv(const DiscreteSolution& sol, std::ostream& out);

}  // namespace plap
