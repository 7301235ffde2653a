#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "plap/cli.hpp"
#include "plap/csv_io.hpp"
#include "plap/error.hpp"
#include "plap/radial_barrier.hpp"

namespace plap::cli {

using json_io::json;
using json_io::number;

namespace {

std::filesystem::path output_dir(const RunConfig& cfg, const Options& opt) {
    auto dir = opt.out ? *opt.out : cfg.outputs.dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

template <class Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    fn(out);
    out.flush();
    if (!out) throw ConfigError("write to " + path.string() + " failed");
}

void write_json(const std::filesystem::path& path, const json& j) {
    write_file(path, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

bool wants_trace(const RunConfig& cfg, const Options& opt) { return opt.trace || cfg.outputs.wants("trace"); }

std::string y_label(double y) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", y);
    return buf;
}

// Grid row nearest y, as (x, u) over its active nodes.
void write_profile(const DiscreteSolution& sol, double y, std::ostream& out) {
    const Mesh& m = *sol.mesh;
    const int j = std::clamp(static_cast<int>(std::lround((y - m.origin().y) / m.spacing())), 0, m.ny() - 1);
    csv::Writer w(out);
    w.header({"x", "u"});
    for (int i = 0; i < m.nx(); ++i) {
        const int id = m.node_at(i, j);
        if (m.active(id)) w.row({m.nodes()[id].position.x, sol.values[id]});
    }
}

json solution_summary(const DiscreteSolution& sol) {
    return {{"energy", number(sol.energy)},
            {"iterations", sol.iterations},
            {"converged", sol.converged},
            {"grad_inf_norm", number(sol.grad_inf_norm)},
            {"grad_tol", number(sol.grad_tol)},
            {"free_nodes", sol.mesh->num_free()},
            {"triangles", sol.mesh->triangles().size()},
            {"max_principle", json_io::to_json(max_principle_report(sol))}};
}

double sup_abs(const DiscreteSolution& sol) {
    double s = 0.0;
    for (std::size_t k = 0; k < sol.values.size(); ++k)
        if (sol.mesh->active(static_cast<int>(k))) s = std::max(s, std::abs(sol.values[k]));
    return s;
}

struct Symmetry {
    double odd_x = 0.0;
    double even_y = 0.0;
};

Symmetry symmetry_errors(const DiscreteSolution& sol) {
    const Mesh& m = *sol.mesh;
    Symmetry s;
    for (int j = 0; j < m.ny(); ++j)
        for (int i = 0; i < m.nx(); ++i) {
            const int id = m.node_at(i, j);
            const int mx = m.node_at(m.nx() - 1 - i, j);
            const int my = m.node_at(i, m.ny() - 1 - j);
            if (!m.active(id) || !m.active(mx) || !m.active(my)) continue;
            s.odd_x = std::max(s.odd_x, std::abs(sol.values[id] + sol.values[mx]));
            s.even_y = std::max(s.even_y, std::abs(sol.values[id] - sol.values[my]));
        }
    return s;
}

json check(bool passed, json details) {
    details["passed"] = passed;
    return details;
}

// Report of a continuation run plus the final-stage checks. Sets all_passed.
json continuation_report(const RunConfig& cfg, const OperatorSpec& spec, const ContinuationPlan& plan,
                         const std::vector<StageResult>& stages, bool& all_passed) {
    const auto& ck = cfg.checks;
    json j;
    j["config"] = resolved_json(cfg);
    json jstages = json::array();
    json deltas = json::array();
    bool mp_ok = true;
    bool converged = true;
    for (const auto& st : stages) {
        json s = solution_summary(st.solution);
        s["r"] = number(st.r);
        s["R"] = number(st.R);
        s["h"] = number(st.h);
        s["probe_delta"] = number(st.probe_delta);
        jstages.push_back(s);
        if (!std::isnan(st.probe_delta)) deltas.push_back(number(st.probe_delta));
        mp_ok = mp_ok && max_principle_report(st.solution).violation <= ck.max_principle_tol;
        converged = converged && st.solution.converged;
    }
    j["stages"] = jstages;
    j["probe_deltas"] = deltas;

    json checks;
    checks["converged"] = check(converged, json::object());
    checks["max_principle"] = check(mp_ok, {{"tolerance", number(ck.max_principle_tol)}});

    bool probe_ok = true;
    for (std::size_t k = 2; k < stages.size(); ++k) probe_ok = probe_ok && stages[k].probe_delta <= stages[k - 1].probe_delta;
    checks["probe_delta_decreasing"] = check(probe_ok, {{"probe_deltas", deltas}});

    const auto& last = stages.back();
    const auto sw = barrier_sandwich_check(last.solution, spec, last.config);
    const double budget = ck.sandwich_budget * last.h;
    checks["barrier_sandwich"] =
        check(sw.lower <= budget && sw.upper <= budget, {{"report", json_io::to_json(sw)}, {"budget", number(budget)}});

    double r_max = plan.r_schedule.front(), far = 0.0;
    for (const auto& pc : plan.base.punctures) far = std::max(far, norm(pc.center));
    const double U = ck.tail_U_radius ? *ck.tail_U_radius : far + 1.25 * r_max;
    std::vector<double> Rs = ck.tail_R_list;
    if (Rs.empty())
        for (double f : {0.25, 0.375, 0.5, 0.75, 1.0})
            if (f * last.R > U) Rs.push_back(f * last.R);
    try {
        const auto I = lp_gradient_tail(last.solution, spec, U, Rs);
        json incs = json::array();
        bool monotone = std::is_sorted(I.begin(), I.end());
        bool inc_ok = true;
        double prev_inc = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < Rs.size(); ++a) {
            auto b = std::find(Rs.begin(), Rs.end(), 2.0 * Rs[a]);
            if (b == Rs.end()) continue;
            const double inc = I[b - Rs.begin()] - I[a];
            incs.push_back({{"R", number(Rs[a])}, {"increment", number(inc)}});
            inc_ok = inc_ok && inc > 0.0 && inc < prev_inc;
            prev_inc = inc;
        }
        const double su = sup_abs(last.solution);
        const double ratio = su > 0.0 ? I.back() / std::pow(su, spec.p()) : 0.0;
        json tail = {{"U_radius", number(U)},
                     {"R_list", Rs},
                     {"integrals", I},
                     {"increments", incs},
                     {"nondecreasing", monotone},
                     {"sup_abs_u", number(su)},
                     {"ratio_to_sup_pow_p", number(ratio)}};
        bool ok = monotone && inc_ok;
        if (ck.c_check) {
            tail["c_check"] = number(*ck.c_check);
            ok = ok && ratio <= *ck.c_check;
        }
        checks["gradient_tail"] = check(ok, tail);
    } catch (const PreconditionError& e) {
        checks["gradient_tail"] = check(false, {{"error", e.what()}});
    }

    all_passed = true;
    for (const auto& [name, c] : checks.items()) all_passed = all_passed && c.at("passed").get<bool>();
    j["checks"] = checks;
    j["all_passed"] = all_passed;
    return j;
}

void write_stage_traces(const std::vector<StageResult>& stages, const std::filesystem::path& dir) {
    for (std::size_t k = 0; k < stages.size(); ++k)
        write_file(dir / ("trace_stage" + std::to_string(k) + ".csv"),
                   [&](std::ostream& out) { write_trace_csv(stages[k].solution, out); });
}

}  // namespace

int cmd_radial(const RunConfig& cfg, const Options& opt) {
    const OperatorSpec spec = cfg.make_spec();
    const auto& rs = cfg.radial;
    const auto dir = output_dir(cfg, opt);
    RadialBarrier b{spec, rs.a, rs.s};
    const auto grid = rs.grid();
    std::vector<std::array<double, 4>> rows;
    for (double r : grid) {
        if (r < rs.s) throw ConfigError("radial: grid radius " + csv::format_double(r) + " is below s");
        const auto env = envelope_bounds(spec, rs.a, rs.s, r);
        rows.push_back({r, barrier_value(b, r), env.lower, env.upper});
    }
    write_file(dir / "radial.csv", [&](std::ostream& out) {
        csv::Writer w(out);
        w.header({"r", "v", "lower", "upper"});
        for (const auto& row : rows) w.row(row);
    });
    return kSuccess;
}

int cmd_solve(const RunConfig& cfg, const Options& opt) {
    const OperatorSpec spec = cfg.make_spec();
    const auto& domain = cfg.require_domain();
    domain.validate();
    const auto dir = output_dir(cfg, opt);
    auto mesh = std::make_shared<const Mesh>(build_mesh(domain));
    if (cfg.outputs.wants("mesh")) write_file(dir / "mesh.csv", [&](std::ostream& out) { write_mesh_csv(*mesh, out); });

    DiscreteSolution sol;
    try {
        sol = solve(mesh, spec, cfg.solver);
    } catch (const SolveFailure& e) {
        write_file(dir / "trace.csv", [&](std::ostream& out) { write_trace_csv(e.partial(), out); });
        throw;
    }
    if (cfg.outputs.wants("heatmap"))
        write_file(dir / "heatmap.csv", [&](std::ostream& out) { write_heatmap_csv(sol, out); });
    if (wants_trace(cfg, opt) || !sol.converged)
        write_file(dir / "trace.csv", [&](std::ostream& out) { write_trace_csv(sol, out); });
    if (cfg.outputs.wants("report")) {
        json j;
        j["config"] = resolved_json(cfg);
        j["solution"] = solution_summary(sol);
        write_json(dir / "report.json", j);
    }
    if (!sol.converged) {
        std::cerr << "plap: solver did not converge within " << cfg.solver.max_iter << " iterations\n";
        return kSolverFailure;
    }
    return kSuccess;
}

int cmd_continue(const RunConfig& cfg, const Options& opt) {
    const OperatorSpec spec = cfg.make_spec();
    const ContinuationPlan plan = cfg.make_plan();
    const auto dir = output_dir(cfg, opt);
    std::vector<StageResult> stages;
    try {
        stages = run_continuation(plan, spec, cfg.solver);
    } catch (const ContinuationError& e) {
        write_stage_traces(e.partial(), dir);
        throw;
    }
    if (wants_trace(cfg, opt)) write_stage_traces(stages, dir);
    if (cfg.outputs.wants("heatmap"))
        write_file(dir / "heatmap.csv", [&](std::ostream& out) { write_heatmap_csv(stages.back().solution, out); });
    bool passed = false;
    const json report = continuation_report(cfg, spec, plan, stages, passed);
    if (cfg.outputs.wants("report")) write_json(dir / "report.json", report);
    for (const auto& st : stages)
        if (!st.solution.converged) return kSolverFailure;
    return kSuccess;
}

int cmd_figure1(const RunConfig& cfg, const Options& opt) {
    const OperatorSpec spec = cfg.make_spec();
    const ContinuationPlan plan = cfg.make_plan();
    const auto dir = output_dir(cfg, opt);
    std::vector<StageResult> stages;
    try {
        stages = run_continuation(plan, spec, cfg.solver);
    } catch (const ContinuationError& e) {
        write_stage_traces(e.partial(), dir);
        throw;
    }
    if (wants_trace(cfg, opt)) write_stage_traces(stages, dir);
    const auto& sol = stages.back().solution;
    if (cfg.outputs.wants("heatmap"))
        write_file(dir / "heatmap.csv", [&](std::ostream& out) { write_heatmap_csv(sol, out); });
    if (cfg.outputs.wants("profiles"))
        for (double y : cfg.profiles)
            write_file(dir / ("profile_y" + y_label(y) + ".csv"), [&](std::ostream& out) { write_profile(sol, y, out); });

    bool passed = false;
    json report = continuation_report(cfg, spec, plan, stages, passed);
    const auto sym = symmetry_errors(sol);
    report["symmetry"] = {{"odd_in_x", number(sym.odd_x)}, {"even_in_y", number(sym.even_y)}};
    const double R = stages.back().R;
    const auto ring = cfg.checks.far_field_ring.value_or(std::make_pair(R - 1.0, R));
    double far = 0.0;
    const Mesh& m = *sol.mesh;
    for (std::size_t k = 0; k < m.nodes().size(); ++k) {
        const double rad = norm(m.nodes()[k].position);
        if (m.active(static_cast<int>(k)) && rad >= ring.first && rad <= ring.second)
            far = std::max(far, std::abs(sol.values[k]));
    }
    json ff = {{"ring", {ring.first, ring.second}}, {"max_abs_u", number(far)}};
    if (cfg.checks.far_field_bound) {
        ff["bound"] = number(*cfg.checks.far_field_bound);
        ff["passed"] = far <= *cfg.checks.far_field_bound;
    }
    report["far_field"] = ff;
    if (cfg.outputs.wants("report")) write_json(dir / "report.json", report);
    for (const auto& st : stages)
        if (!st.solution.converged) return kSolverFailure;
    return kSuccess;
}

}  // namespace plap::cli
