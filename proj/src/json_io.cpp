#include "plap/json_io.hpp"

#include <cmath>

#include "plap/csv_io.hpp"
#include "plap/detail/json_reader.hpp"
#include "plap/error.hpp"

namespace plap::json_io {

namespace {

using detail::Reader;

json vec(Vec2 v) { return json::array({number(v.x), number(v.y)}); }

json numbers(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

}  // namespace

json number(double v) {
    if (std::isfinite(v)) return v;
    return csv::format_double(v);
}

AFamily family_from_json(const json& j, const std::string& path) {
    Reader r(j, path);
    const std::string kind = r.string("kind", "constant");
    AFamily family;
    if (kind == "constant") {
        family = ConstantFamily{r.number("value", 1.0)};
    } else if (kind == "rational") {
        family = RationalFamily{r.number("base", 1.0), r.number("slope", 1.0)};
    } else if (kind == "table") {
        family = TableFamily(r.numbers("knots"), r.numbers("values"));
    } else {
        throw ConfigError(path + ".kind: unknown family '" + kind + "'");
    }
    r.finish();
    return family;
}

json to_json(const AFamily& family) {
    return std::visit(
        [](const auto& f) -> json {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, ConstantFamily>) {
                return {{"kind", "constant"}, {"value", number(f.value)}};
            } else if constexpr (std::is_same_v<F, RationalFamily>) {
                return {{"kind", "rational"}, {"base", number(f.base)}, {"slope", number(f.slope)}};
            } else {
                return {{"kind", "table"}, {"knots", numbers(f.knots())}, {"values", numbers(f.values())}};
            }
        },
        family);
}

OperatorSpec operator_from_json(const json& j) {
    Reader r(j, "operator");
    const double p = r.number("p");
    const int n = r.integer("n", 2);
    AFamily family = r.has("family") ? family_from_json(r.at("family")) : AFamily{ConstantFamily{}};
    r.number("delta", 0.0);  // echoed by to_json, recomputed here
    r.number("L", 0.0);
    r.finish();
    return make_operator(p, n, std::move(family));
}

json to_json(const OperatorSpec& spec) {
    return {{"p", number(spec.p())},
            {"n", spec.n()},
            {"family", to_json(spec.family())},
            {"delta", number(spec.delta())},
            {"L", number(spec.L_bound())}};
}

DomainConfig domain_from_json(const json& j) {
    Reader r(j, "domain");
    DomainConfig cfg;
    const json& pcs = r.at("punctures");
    if (!pcs.is_array()) throw ConfigError("domain.punctures: expected an array");
    for (std::size_t k = 0; k < pcs.size(); ++k) {
        Reader pr(pcs[k], "domain.punctures[" + std::to_string(k) + "]");
        Puncture pc;
        pc.center = pr.vec2("center");
        pc.value = pr.number("value");
        pr.finish();
        cfg.punctures.push_back(pc);
    }
    cfg.hole_radius = r.number("hole_radius", cfg.hole_radius);
    cfg.outer_radius = r.number("outer_radius", cfg.outer_radius);
    cfg.outer_value = r.optional_number("outer_value");
    cfg.spacing = r.number("spacing", cfg.spacing);
    const std::string pattern = r.string("pattern", "alternating");
    if (pattern == "alternating")
        cfg.pattern = DiagonalPattern::Alternating;
    else if (pattern == "uniform")
        cfg.pattern = DiagonalPattern::Uniform;
    else
        throw ConfigError("domain.pattern: expected 'alternating' or 'uniform'");
    r.finish();
    return cfg;
}

json to_json(const DomainConfig& cfg) {
    json pcs = json::array();
    for (const auto& pc : cfg.punctures) pcs.push_back({{"center", vec(pc.center)}, {"value", number(pc.value)}});
    return {{"punctures", pcs},
            {"hole_radius", number(cfg.hole_radius)},
            {"outer_radius", number(cfg.outer_radius)},
            {"outer_value", number(cfg.resolved_outer_value())},
            {"spacing", number(cfg.spacing)},
            {"pattern", cfg.pattern == DiagonalPattern::Alternating ? "alternating" : "uniform"}};
}

SolverParams solver_from_json(const json& j) {
    Reader r(j, "solver");
    SolverParams s;
    s.grad_tol = r.optional_number("grad_tol");
    s.grad_tol_relative = r.number("grad_tol_relative", s.grad_tol_relative);
    s.max_iter = r.integer("max_iter", s.max_iter);
    s.p_continuation = r.numbers("p_continuation");
    s.stage_tol_factor = r.number("stage_tol_factor", s.stage_tol_factor);
    if (r.has("line_search")) {
        Reader lr(r.at("line_search"), "solver.line_search");
        s.line_search.backtrack = lr.number("backtrack", s.line_search.backtrack);
        s.line_search.sufficient_decrease = lr.number("sufficient_decrease", s.line_search.sufficient_decrease);
        s.line_search.max_steps = lr.integer("max_steps", s.line_search.max_steps);
        lr.finish();
    } else {
        r.mark("line_search");
    }
    s.memory = r.integer("memory", s.memory);
    s.diagonal_scaling = r.boolean("diagonal_scaling", s.diagonal_scaling);
    s.diagonal_refresh = r.integer("diagonal_refresh", s.diagonal_refresh);
    r.finish();
    if (s.diagonal_refresh <= 0) throw ConfigError("solver.diagonal_refresh: must be positive");
    return s;
}

json to_json(const SolverParams& s) {
    return {{"grad_tol", s.grad_tol ? number(*s.grad_tol) : json(nullptr)},
            {"grad_tol_relative", number(s.grad_tol_relative)},
            {"max_iter", s.max_iter},
            {"p_continuation", numbers(s.p_continuation)},
            {"stage_tol_factor", number(s.stage_tol_factor)},
            {"line_search",
             {{"backtrack", number(s.line_search.backtrack)},
              {"sufficient_decrease", number(s.line_search.sufficient_decrease)},
              {"max_steps", s.line_search.max_steps}}},
            {"memory", s.memory},
            {"diagonal_scaling", s.diagonal_scaling},
            {"diagonal_refresh", s.diagonal_refresh}};
}

ContinuationPlan plan_from_json(const json& j, const DomainConfig& base) {
    Reader r(j, "continuation");
    ContinuationPlan plan;
    plan.base = base;
    plan.r_schedule = r.numbers("r_schedule", {base.hole_radius});
    plan.R_schedule = r.numbers("R_schedule", {base.outer_radius});
    if (r.has("probe_region")) {
        Reader pr(r.at("probe_region"), "continuation.probe_region");
        plan.probe_region.lo = pr.vec2("lo", plan.probe_region.lo);
        plan.probe_region.hi = pr.vec2("hi", plan.probe_region.hi);
        plan.probe_region.samples_per_axis = pr.integer("samples_per_axis", plan.probe_region.samples_per_axis);
        pr.finish();
    } else {
        r.mark("probe_region");
    }
    if (r.has("h_rule")) {
        Reader hr(r.at("h_rule"), "continuation.h_rule");
        plan.h_rule.fixed = hr.optional_number("fixed");
        plan.h_rule.r_fraction = hr.number("r_fraction", plan.h_rule.r_fraction);
        plan.h_rule.n_max = hr.integer("n_max", plan.h_rule.n_max);
        hr.finish();
    } else {
        r.mark("h_rule");
    }
    const std::string trav = r.string("traversal", "diagonal");
    if (trav == "diagonal")
        plan.traversal = Traversal::Diagonal;
    else if (trav == "nested")
        plan.traversal = Traversal::Nested;
    else
        throw ConfigError("continuation.traversal: expected 'diagonal' or 'nested'");
    r.finish();
    return plan;
}

json to_json(const ContinuationPlan& plan) {
    return {{"r_schedule", numbers(plan.r_schedule)},
            {"R_schedule", numbers(plan.R_schedule)},
            {"probe_region",
             {{"lo", vec(plan.probe_region.lo)},
              {"hi", vec(plan.probe_region.hi)},
              {"samples_per_axis", plan.probe_region.samples_per_axis}}},
            {"h_rule",
             {{"fixed", plan.h_rule.fixed ? number(*plan.h_rule.fixed) : json(nullptr)},
              {"r_fraction", number(plan.h_rule.r_fraction)},
              {"n_max", plan.h_rule.n_max}}},
            {"traversal", plan.traversal == Traversal::Diagonal ? "diagonal" : "nested"}};
}

json to_json(const MaxPrincipleReport& r) {
    return {{"min_u", number(r.min_u)},
            {"max_u", number(r.max_u)},
            {"min_dirichlet", number(r.min_dirichlet)},
            {"max_dirichlet", number(r.max_dirichlet)},
            {"violation", number(r.violation)}};
}

json to_json(const SandwichReport& r) {
    return {{"r0", number(r.r0)},
            {"a", numbers(r.a)},
            {"lower", number(r.lower)},
            {"upper", number(r.upper)},
            {"max_violation", number(r.max_violation)}};
}

json to_json(const LiouvilleReport& r) {
    return {{"passed", r.passed},
            {"c", number(r.c)},
            {"stage_sup_deviation", numbers(r.stage_sup_deviation)},
            {"max_deviation", number(r.max_deviation)}};
}

json to_json(const DamascelliReport& r) {
    auto pair = [](const std::pair<Vec2, Vec2>& p) { return json::array({vec(p.first), vec(p.second)}); };
    return {{"c1_est", number(r.c1_est)},
            {"c2_est", number(r.c2_est)},
            {"gamma_est", number(r.gamma_est)},
            {"Gamma_est", number(r.Gamma_est)},
            {"sample_count", r.sample_count},
            {"worst_case_pair", pair(r.worst_case_pair)},
            {"c1_pair", pair(r.c1_pair)},
            {"violations", r.violations}};
}

}  // namespace plap::json_io
