#include "plap/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "plap/assembly.hpp"
#include "plap/csv_io.hpp"
#include "plap/radial_barrier.hpp"

namespace plap {

double HRule::spacing(double r, double R) const {
    if (fixed) return *fixed;
    return std::min(r * r_fraction, R / n_max);
}

std::vector<Vec2> ProbeRegion::points() const {
    std::vector<Vec2> pts;
    const int n = samples_per_axis;
    pts.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double tx = n == 1 ? 0.5 : static_cast<double>(i) / (n - 1);
            const double ty = n == 1 ? 0.5 : static_cast<double>(j) / (n - 1);
            pts.push_back({lo.x + tx * (hi.x - lo.x), lo.y + ty * (hi.y - lo.y)});
        }
    return pts;
}

std::vector<std::pair<double, double>> ContinuationPlan::stages() const {
    std::vector<std::pair<double, double>> out;
    if (traversal == Traversal::Diagonal) {
        const std::size_t n = std::max(r_schedule.size(), R_schedule.size());
        for (std::size_t k = 0; k < n; ++k)
            out.emplace_back(r_schedule[std::min(k, r_schedule.size() - 1)],
                             R_schedule[std::min(k, R_schedule.size() - 1)]);
    } else {
        for (double R : R_schedule)
            for (double r : r_schedule) out.emplace_back(r, R);
    }
    return out;
}

DomainConfig ContinuationPlan::stage_config(double r, double R) const {
    DomainConfig cfg = base;
    cfg.hole_radius = r;
    cfg.outer_radius = R;
    cfg.spacing = h_rule.spacing(r, R);
    // Keep the outer value fixed across stages even when it was defaulted.
    cfg.outer_value = base.resolved_outer_value();
    return cfg;
}

void ContinuationPlan::validate() const {
    if (r_schedule.empty() || R_schedule.empty()) throw ConfigError("continuation: schedules must be nonempty");
    for (std::size_t k = 1; k < r_schedule.size(); ++k)
        if (!(r_schedule[k] < r_schedule[k - 1]))
            throw ConfigError("continuation: hole radii must be strictly decreasing");
    for (std::size_t k = 1; k < R_schedule.size(); ++k)
        if (!(R_schedule[k] > R_schedule[k - 1]))
            throw ConfigError("continuation: outer radii must be strictly increasing");
    if (h_rule.fixed && !(*h_rule.fixed > 0.0)) throw ConfigError("continuation: fixed spacing must be positive");
    if (!h_rule.fixed && (!(h_rule.r_fraction > 0.0) || h_rule.n_max <= 0))
        throw ConfigError("continuation: invalid spacing rule");
    if (probe_region.samples_per_axis < 1) throw ConfigError("continuation: probe lattice must be nonempty");
    if (!(probe_region.lo.x <= probe_region.hi.x && probe_region.lo.y <= probe_region.hi.y))
        throw ConfigError("continuation: probe box corners out of order");

    const double R_min = R_schedule.front();
    const double r_max = r_schedule.front();
    const auto& b = probe_region;
    for (Vec2 c : {b.lo, b.hi, Vec2{b.lo.x, b.hi.y}, Vec2{b.hi.x, b.lo.y}})
        if (!(norm(c) < R_min)) throw ConfigError("continuation: probe region leaves the smallest outer ball");
    for (const auto& pc : base.punctures) {
        const Vec2 nearest{std::clamp(pc.center.x, b.lo.x, b.hi.x), std::clamp(pc.center.y, b.lo.y, b.hi.y)};
        if (!(norm(nearest - pc.center) > r_max))
            throw ConfigError("continuation: probe region meets a hole of the largest radius");
    }
    for (const auto& [r, R] : stages()) stage_config(r, R).validate();
}

namespace {

double nearest_hole_or_outer(const DomainConfig& cfg, Vec2 x) {
    for (const auto& pc : cfg.punctures)
        if (norm(x - pc.center) <= cfg.hole_radius + 2.0 * cfg.spacing) return pc.value;
    return cfg.resolved_outer_value();
}

std::vector<double> probe(const DiscreteSolution& sol, const std::vector<Vec2>& pts) {
    std::vector<double> out;
    out.reserve(pts.size());
    for (Vec2 x : pts) {
        auto v = sol.mesh->interpolate(sol.values, x);
        if (!v) throw ConfigError("continuation: probe point (" + csv::format_double(x.x) + ", " +
                                  csv::format_double(x.y) + ") is not interior to the mesh");
        out.push_back(*v);
    }
    return out;
}

}  // namespace

std::vector<double> transfer_values(const DiscreteSolution& sol, const DomainConfig& old_cfg, const Mesh& mesh) {
    const Mesh& old = *sol.mesh;
    std::vector<double> out = mesh.initial_values(0.0);
    const double h = old.spacing();
    for (int k : mesh.free_nodes()) {
        const Vec2 x = mesh.nodes()[k].position;
        const double fx = (x.x - old.origin().x) / h;
        const double fy = (x.y - old.origin().y) / h;
        // Offsets from the first active corner keep constant data exact.
        double base = 0.0, acc = 0.0, wsum = 0.0;
        if (fx >= 0.0 && fy >= 0.0 && fx <= old.nx() - 1 && fy <= old.ny() - 1) {
            const int i = std::min(static_cast<int>(std::floor(fx)), old.nx() - 2);
            const int j = std::min(static_cast<int>(std::floor(fy)), old.ny() - 2);
            const double tx = fx - i, ty = fy - j;
            const int ids[4] = {old.node_at(i, j), old.node_at(i + 1, j), old.node_at(i, j + 1),
                                old.node_at(i + 1, j + 1)};
            const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
            for (int c = 0; c < 4; ++c)
                if (old.active(ids[c]) && w[c] > 0.0) {
                    if (wsum == 0.0) base = sol.values[ids[c]];
                    acc += w[c] * (sol.values[ids[c]] - base);
                    wsum += w[c];
                }
        }
        out[k] = wsum > 0.0 ? base + acc / wsum : nearest_hole_or_outer(old_cfg, x);
    }
    return out;
}

std::vector<StageResult> run_continuation(const ContinuationPlan& plan, const OperatorSpec& spec,
                                          const SolverParams& params) {
    plan.validate();
    const auto pts = plan.probe_region.points();
    std::vector<StageResult> results;
    for (const auto& [r, R] : plan.stages()) {
        StageResult st;
        st.r = r;
        st.R = R;
        st.config = plan.stage_config(r, R);
        st.h = st.config.spacing;
        try {
            auto mesh = std::make_shared<const Mesh>(build_mesh(st.config));
            if (results.empty()) {
                st.solution = solve(mesh, spec, params);
            } else {
                const auto& prev = results.back();
                const auto init = transfer_values(prev.solution, prev.config, *mesh);
                st.solution = solve(mesh, spec, params, std::span<const double>(init));
            }
            st.probe_values = probe(st.solution, pts);
        } catch (const Error& e) {
            throw ContinuationError("continuation stage (r = " + csv::format_double(r) +
                                        ", R = " + csv::format_double(R) + ") failed: " + e.what(),
                                    std::move(results));
        }
        if (!results.empty()) {
            double d = 0.0;
            for (std::size_t k = 0; k < pts.size(); ++k)
                d = std::max(d, std::abs(st.probe_values[k] - results.back().probe_values[k]));
            st.probe_delta = d;
        }
        results.push_back(std::move(st));
    }
    return results;
}

SandwichReport barrier_sandwich_check(const DiscreteSolution& sol, const OperatorSpec& spec,
                                      const DomainConfig& cfg, std::optional<double> r0) {
    SandwichReport rep;
    const auto& pcs = cfg.punctures;
    if (pcs.empty()) return rep;
    double m = pcs.front().value, M = m;
    for (const auto& pc : pcs) {
        m = std::min(m, pc.value);
        M = std::max(M, pc.value);
    }
    const double outer = cfg.resolved_outer_value();
    m = std::min(m, outer);
    M = std::max(M, outer);

    if (r0) {
        rep.r0 = *r0;
    } else {
        double r = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pcs.size(); ++i) {
            r = std::min(r, cfg.outer_radius - norm(pcs[i].center));
            for (std::size_t j = i + 1; j < pcs.size(); ++j)
                r = std::min(r, 0.5 * norm(pcs[i].center - pcs[j].center));
        }
        rep.r0 = r;
    }
    for (const auto& pc : pcs) {
        const double gap = std::max(M - pc.value, pc.value - m);
        rep.a.push_back(gap > 0.0 ? choose_a_large(spec, rep.r0, gap) : 1.0);
    }

    const Mesh& mesh = *sol.mesh;
    const int n = static_cast<int>(mesh.nodes().size());
    const int k = static_cast<int>(pcs.size());
    std::vector<double> lower(n, -std::numeric_limits<double>::infinity());
    std::vector<double> upper(n, -std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(dynamic, 256)
    for (int id = 0; id < n; ++id) {
        if (!mesh.active(id)) continue;
        const Vec2 x = mesh.nodes()[id].position;
        const double u = sol.values[id];
        for (int i = 0; i < k; ++i) {
            const double dist = norm(x - pcs[i].center);
            const double v = dist > 0.0 ? radial_integral(spec, rep.a[i], 0.0, dist) : 0.0;
            lower[id] = std::max(lower[id], (pcs[i].value - v) - u);
            upper[id] = std::max(upper[id], u - (pcs[i].value + v));
        }
    }
    rep.lower = *std::max_element(lower.begin(), lower.end());
    rep.upper = *std::max_element(upper.begin(), upper.end());
    rep.max_violation = std::max({rep.lower, rep.upper, 0.0});
    return rep;
}

std::vector<double> lp_gradient_tail(const DiscreteSolution& sol, const OperatorSpec& spec, double U_radius,
                                     const std::vector<double>& R_list) {
    const Mesh& mesh = *sol.mesh;
    double extent = 0.0;
    for (std::size_t id = 0; id < mesh.nodes().size(); ++id) {
        const auto& node = mesh.nodes()[id];
        if (node.cls == NodeClass::Excluded) continue;
        extent = std::max(extent, norm(node.position));
        if (node.cls == NodeClass::DirichletInner && !(norm(node.position) < U_radius))
            throw PreconditionError("lp_gradient_tail: U_radius does not cover every hole");
    }
    const auto& tris = mesh.triangles();
    const int nt = static_cast<int>(tris.size());
    std::vector<double> radius(nt), contrib(nt);
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nt; ++t) {
        const auto& tri = tris[t];
        const auto& nodes = mesh.nodes();
        const Vec2 c = (1.0 / 3.0) * (nodes[tri.v[0]].position + nodes[tri.v[1]].position + nodes[tri.v[2]].position);
        radius[t] = norm(c);
        const double g = norm(triangle_gradient(tri, sol.values));
        contrib[t] = tri.area * std::pow(g, spec.p());
    }
    std::vector<double> out;
    for (double R : R_list) {
        if (R > extent) throw PreconditionError("lp_gradient_tail: R = " + csv::format_double(R) +
                                                " exceeds the mesh outer radius");
        double sum = 0.0;
        int count = 0;
        for (int t = 0; t < nt; ++t)
            if (radius[t] >= U_radius && radius[t] < R) {
                sum += contrib[t];
                ++count;
            }
        if (count == 0) throw PreconditionError("lp_gradient_tail: empty annulus for R = " + csv::format_double(R));
        out.push_back(sum);
    }
    return out;
}

LiouvilleReport liouville_check(const ContinuationPlan& plan, const OperatorSpec& spec, const SolverParams& params,
                                double c) {
    LiouvilleReport rep;
    rep.c = c;
    rep.passed = true;
    for (const auto& st : run_continuation(plan, spec, params)) {
        double sup = 0.0;
        const Mesh& mesh = *st.solution.mesh;
        for (std::size_t id = 0; id < mesh.nodes().size(); ++id)
            if (mesh.active(static_cast<int>(id))) sup = std::max(sup, std::abs(st.solution.values[id] - c));
        rep.stage_sup_deviation.push_back(sup);
        rep.max_deviation = std::max(rep.max_deviation, sup);
        if (!(sup <= 10.0 * st.solution.grad_tol)) rep.passed = false;
    }
    return rep;
}

}  // namespace plap
