#include "plap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <ostream>

#include "plap/assembly.hpp"
#include "plap/csv_io.hpp"
#include "plap/error.hpp"
#include "plap/parallel.hpp"

namespace plap {

void SolverParams::validate(double target_p) const {
    if (grad_tol && !(*grad_tol > 0.0)) throw ConfigError("solver: grad_tol must be positive");
    if (!(grad_tol_relative > 0.0)) throw ConfigError("solver: grad_tol_relative must be positive");
    if (max_iter < 0) throw ConfigError("solver: max_iter must be nonnegative");
    if (memory < 0) throw ConfigError("solver: memory must be nonnegative");
    if (!(line_search.backtrack > 0.0 && line_search.backtrack < 1.0))
        throw ConfigError("solver: backtracking factor must lie in (0, 1)");
    if (!(line_search.sufficient_decrease > 0.0 && line_search.sufficient_decrease < 1.0))
        throw ConfigError("solver: sufficient-decrease constant must lie in (0, 1)");
    if (!p_continuation.empty()) {
        if (p_continuation.front() != 2.0) throw ConfigError("solver: p continuation must start at 2");
        if (p_continuation.back() != target_p) throw ConfigError("solver: p continuation must end at the target p");
        for (std::size_t k = 1; k < p_continuation.size(); ++k)
            if (p_continuation[k] < p_continuation[k - 1])
                throw ConfigError("solver: p continuation must be nondecreasing");
    }
    if (target_p < 2.0) throw ConfigError("solver: exponents below 2 are not supported");
}

std::vector<double> SolverParams::resolved_continuation(double target_p) const {
    if (!p_continuation.empty()) return p_continuation;
    std::vector<double> ps;
    for (double q = 2.0; q < target_p; q += 1.0) ps.push_back(q);
    ps.push_back(target_p);
    return ps;
}

namespace {

// Relative bound on the summation error of a computed energy.
constexpr double kEnergyRoundoff = 1e-13;

struct CorrectionPair {
    std::vector<double> s, y;
    double rho;
};

class StageSolver {
public:
    StageSolver(const Mesh& mesh, const OperatorSpec& spec, const SolverParams& params, double tol_factor,
                DiscreteSolution& sol)
        : mesh_(mesh), spec_(spec), params_(params), tol_factor_(tol_factor), sol_(sol), asm_(mesh, spec),
          n_(mesh.num_free()), g_(n_), d_(n_), diag_(n_, 1.0), trial_g_(n_), trial_u_(sol.values) {}

    void run() {
        auto& u = sol_.values;
        double E = asm_.energy_and_gradient(u, g_);
        refresh_diagonal();
        int stage_iter = 0;
        while (true) {
            const double gnorm = parallel::inf_norm(g_);
            const double tol = threshold(E);
            sol_.energy = E;
            sol_.grad_inf_norm = gnorm;
            sol_.grad_tol = tol;
            sol_.trace.push_back({sol_.iterations, E, gnorm, spec_.p()});
            if (gnorm <= tol) {
                sol_.converged = true;
                return;
            }
            if (sol_.iterations >= params_.max_iter) {
                sol_.converged = false;
                return;
            }
            if (params_.diagonal_scaling && stage_iter > 0 && stage_iter % params_.diagonal_refresh == 0)
                refresh_diagonal();

            direction();
            double gd = parallel::dot(g_, d_);
            if (!(gd < 0.0)) {
                memory_.clear();
                direction();
                gd = parallel::dot(g_, d_);
            }
            if (!(gd < 0.0)) {
                sol_.converged = false;
                return;
            }

            double E_new;
            if (!line_search(E, gd, E_new)) {
                memory_.clear();
                direction();
                gd = parallel::dot(g_, d_);
                if (!(gd < 0.0) || !line_search(E, gd, E_new)) {
                    // No representable descent left: the iterate is as good
                    // as double precision allows, report it unconverged.
                    if (gnorm <= 1e3 * tol) {
                        sol_.converged = false;
                        return;
                    }
                    throw SolverError("line search failed to find descent at iteration " +
                                      std::to_string(sol_.iterations) + " (grad inf-norm " +
                                      csv::format_double(gnorm) + ")");
                }
            }
            accept();
            E = E_new;
            ++sol_.iterations;
            ++stage_iter;
        }
    }

private:
    double threshold(double E) const {
        const double base = params_.grad_tol ? *params_.grad_tol : params_.grad_tol_relative * (1.0 + std::abs(E));
        return base * tol_factor_;
    }

    void refresh_diagonal() {
        if (!params_.diagonal_scaling) return;
        asm_.hessian_diagonal(sol_.values, diag_);
        double dmax = 0.0;
        for (double v : diag_) dmax = std::max(dmax, v);
        const double floor = dmax > 0.0 ? 1e-10 * dmax : 1.0;
        for (double& v : diag_) v = std::max(v, floor);
    }

    // d = -H g by the two-loop recursion with H0 = gamma * diag^{-1}.
    void direction() {
        for (std::size_t i = 0; i < n_; ++i) d_[i] = -g_[i];
        std::vector<double> alpha(memory_.size());
        for (std::size_t k = memory_.size(); k-- > 0;) {
            const auto& c = memory_[k];
            alpha[k] = c.rho * parallel::dot(c.s, d_);
            parallel::axpy(-alpha[k], c.y, d_);
        }
        double gamma = 1.0;
        if (!memory_.empty()) {
            const auto& c = memory_.back();
            double yHy = 0.0;
            for (std::size_t i = 0; i < n_; ++i) yHy += c.y[i] * c.y[i] / diag_[i];
            gamma = 1.0 / (c.rho * yHy);
        }
        for (std::size_t i = 0; i < n_; ++i) d_[i] *= gamma / diag_[i];
        for (std::size_t k = 0; k < memory_.size(); ++k) {
            const auto& c = memory_[k];
            const double beta = c.rho * parallel::dot(c.y, d_);
            parallel::axpy(alpha[k] - beta, c.s, d_);
        }
    }

    void set_trial(double alpha) {
        const auto& free = mesh_.free_nodes();
        const auto& u = sol_.values;
        for (std::size_t k = 0; k < n_; ++k) trial_u_[free[k]] = u[free[k]] + alpha * d_[k];
    }

    // Backtracking; sufficient decrease is accepted either from the energy
    // values or from the slope at the trial point: for convex E,
    // E(alpha) <= E(0) + alpha * E'(alpha), so E'(alpha) <= c E'(0) implies
    // the Armijo condition without the cancellation in E(alpha) - E(0). That
    // branch still rejects a computed increase beyond the summation round-off
    // of E, so the trace is monotone to within kEnergyRoundoff.
    bool line_search(double E, double gd, double& E_new) {
        const double c = params_.line_search.sufficient_decrease;
        double alpha = 1.0;
        for (int step = 0; step < params_.line_search.max_steps; ++step) {
            set_trial(alpha);
            const double Et = asm_.energy_and_gradient(trial_u_, trial_g_);
            const double gdt = parallel::dot(trial_g_, d_);
            if (std::isfinite(Et) && (Et <= E + c * alpha * gd || (gdt <= c * gd && Et <= E + kEnergyRoundoff * std::abs(E)))) {
                E_new = Et;
                alpha_ = alpha;
                return true;
            }
            alpha *= params_.line_search.backtrack;
        }
        return false;
    }

    void accept() {
        CorrectionPair pair{std::vector<double>(n_), std::vector<double>(n_), 0.0};
        for (std::size_t i = 0; i < n_; ++i) {
            pair.s[i] = alpha_ * d_[i];
            pair.y[i] = trial_g_[i] - g_[i];
        }
        const double sy = parallel::dot(pair.s, pair.y);
        // Both vectors share Dirichlet entries, and set_trial rewrites the
        // FREE ones, so swapping is enough.
        sol_.values.swap(trial_u_);
        g_.swap(trial_g_);
        if (params_.memory > 0 && sy > 0.0) {
            pair.rho = 1.0 / sy;
            if (static_cast<int>(memory_.size()) == params_.memory) memory_.pop_front();
            memory_.push_back(std::move(pair));
        }
    }

    const Mesh& mesh_;
    const OperatorSpec& spec_;
    const SolverParams& params_;
    double tol_factor_;
    DiscreteSolution& sol_;
    Assembler asm_;
    std::size_t n_;
    std::vector<double> g_, d_, diag_, trial_g_, trial_u_;
    std::deque<CorrectionPair> memory_;
    double alpha_ = 1.0;
};

}  // namespace

DiscreteSolution solve(std::shared_ptr<const Mesh> mesh, const OperatorSpec& spec, const SolverParams& params,
                       std::optional<std::span<const double>> initial) {
    if (!mesh) throw PreconditionError("solve: null mesh");
    params.validate(spec.p());

    DiscreteSolution sol;
    sol.mesh = mesh;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < mesh->nodes().size(); ++k)
        if (mesh->is_dirichlet(static_cast<int>(k))) {
            lo = std::min(lo, mesh->nodes()[k].dirichlet_value);
            hi = std::max(hi, mesh->nodes()[k].dirichlet_value);
        }
    if (!(lo <= hi)) throw PreconditionError("solve: mesh has no Dirichlet nodes");
    sol.values = mesh->initial_values(0.5 * (lo + hi));

    std::vector<double> stages;
    if (initial) {
        if (initial->size() != sol.values.size()) throw PreconditionError("solve: initial guess has wrong size");
        for (int k : mesh->free_nodes()) sol.values[k] = (*initial)[k];
        stages = {spec.p()};
    } else {
        stages = params.resolved_continuation(spec.p());
    }

    for (std::size_t k = 0; k < stages.size(); ++k) {
        const bool last = k + 1 == stages.size();
        const OperatorSpec stage_spec = stages[k] == spec.p() ? spec : spec.with_exponent(stages[k]);
        try {
            StageSolver(*mesh, stage_spec, params, last ? 1.0 : params.stage_tol_factor, sol).run();
        } catch (const SolverError& e) {
            throw SolveFailure(e.what(), std::move(sol));
        }
        if (!sol.converged && !last && sol.iterations >= params.max_iter) break;
    }
    return sol;
}

MaxPrincipleReport max_principle_report(const DiscreteSolution& sol) {
    const Mesh& mesh = *sol.mesh;
    MaxPrincipleReport r;
    r.min_u = r.min_dirichlet = std::numeric_limits<double>::infinity();
    r.max_u = r.max_dirichlet = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < mesh.nodes().size(); ++k) {
        const int id = static_cast<int>(k);
        if (!mesh.active(id)) continue;
        r.min_u = std::min(r.min_u, sol.values[k]);
        r.max_u = std::max(r.max_u, sol.values[k]);
        if (mesh.is_dirichlet(id)) {
            r.min_dirichlet = std::min(r.min_dirichlet, sol.values[k]);
            r.max_dirichlet = std::max(r.max_dirichlet, sol.values[k]);
        }
    }
    r.violation = std::max({r.min_dirichlet - r.min_u, r.max_u - r.max_dirichlet, 0.0});
    return r;
}

double compare_solutions(const DiscreteSolution& sol1, const DiscreteSolution& sol2) {
    if (!sol1.mesh || !sol2.mesh) throw PreconditionError("compare_solutions: missing mesh");
    const Mesh& m1 = *sol1.mesh;
    const Mesh& m2 = *sol2.mesh;
    if (&m1 != &m2) {
        bool same = m1.nodes().size() == m2.nodes().size();
        for (std::size_t k = 0; same && k < m1.nodes().size(); ++k)
            same = m1.nodes()[k].position == m2.nodes()[k].position && m1.nodes()[k].cls == m2.nodes()[k].cls;
        if (!same) throw PreconditionError("compare_solutions: solutions live on different meshes");
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m1.nodes().size(); ++k)
        if (m1.active(static_cast<int>(k))) worst = std::max(worst, sol1.values[k] - sol2.values[k]);
    return worst;
}

void write_trace_csv(const DiscreteSolution& sol, std::ostream& out) {
    csv::Writer w(out);
    w.header({"iter", "energy", "grad_norm"});
    for (const auto& e : sol.trace) w.row({static_cast<double>(e.iteration), e.energy, e.grad_norm});
}

void write_heatmap_csv(const DiscreteSolution& sol, std::ostream& out) {
    csv::Writer w(out);
    w.header({"x", "y", "u"});
    const auto& nodes = sol.mesh->nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k)
        if (sol.mesh->active(static_cast<int>(k))) w.row({nodes[k].position.x, nodes[k].position.y, sol.values[k]});
}

}  // namespace plap
