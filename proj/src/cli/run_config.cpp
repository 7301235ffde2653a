#include <cmath>
#include <fstream>

#include "plap/cli.hpp"
#include "plap/detail/json_reader.hpp"
#include "plap/error.hpp"

namespace plap::cli {

using json_io::json;
using json_io::detail::Reader;

std::vector<double> RadialSettings::grid() const {
    if (!r_values.empty()) return r_values;
    if (count < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw ConfigError("radial: invalid log grid");
    std::vector<double> out;
    const double l0 = std::log10(r_min), l1 = std::log10(r_max);
    for (int k = 0; k < count; ++k) out.push_back(std::pow(10.0, l0 + (l1 - l0) * k / (count - 1)));
    return out;
}

OperatorSpec RunConfig::make_spec() const { return json_io::operator_from_json(operator_block); }

const DomainConfig& RunConfig::require_domain() const {
    if (!domain) throw ConfigError("config: a domain block is required");
    return *domain;
}

ContinuationPlan RunConfig::make_plan() const {
    return json_io::plan_from_json(continuation_block ? *continuation_block : json::object(), require_domain());
}

RunConfig parse_run_config(const json& j) {
    Reader r(j, "config");
    RunConfig cfg;
    if (r.has("operator")) {
        cfg.operator_block = r.at("operator");
    } else {
        cfg.operator_block = {{"p", 4.0}, {"n", 2}, {"family", {{"kind", "constant"}, {"value", 1.0}}}};
        r.mark("operator");
    }
    if (r.has("domain")) cfg.domain = json_io::domain_from_json(r.at("domain"));
    if (r.has("solver")) cfg.solver = json_io::solver_from_json(r.at("solver"));
    if (r.has("continuation")) cfg.continuation_block = r.at("continuation");
    r.mark("domain");
    r.mark("solver");
    r.mark("continuation");

    if (r.has("outputs")) {
        Reader o(r.at("outputs"), "config.outputs");
        cfg.outputs.dir = o.string("dir", cfg.outputs.dir.string());
        if (o.has("artifacts")) {
            const json& a = o.at("artifacts");
            if (!a.is_array()) throw ConfigError("config.outputs.artifacts: expected an array of names");
            cfg.outputs.artifacts.clear();
            for (const auto& e : a) {
                if (!e.is_string()) throw ConfigError("config.outputs.artifacts: expected an array of names");
                const auto name = e.get<std::string>();
                if (name != "heatmap" && name != "profiles" && name != "trace" && name != "report" && name != "mesh")
                    throw ConfigError("config.outputs.artifacts: unknown artifact '" + name + "'");
                cfg.outputs.artifacts.insert(name);
            }
        }
        o.mark("artifacts");
        o.finish();
    } else {
        r.mark("outputs");
    }

    if (r.has("radial")) {
        Reader rr(r.at("radial"), "config.radial");
        auto& rs = cfg.radial;
        rs.a = rr.number("a", rs.a);
        rs.s = rr.number("s", rs.s);
        rs.r_values = rr.numbers("r_values");
        rs.r_min = rr.number("r_min", rs.r_min);
        rs.r_max = rr.number("r_max", rs.r_max);
        rs.count = rr.integer("count", rs.count);
        rr.finish();
    } else {
        r.mark("radial");
    }

    cfg.profiles = r.numbers("profiles", cfg.profiles);

    if (r.has("checks")) {
        Reader c(r.at("checks"), "config.checks");
        auto& ck = cfg.checks;
        ck.max_principle_tol = c.number("max_principle_tol", ck.max_principle_tol);
        ck.sandwich_budget = c.number("sandwich_budget", ck.sandwich_budget);
        ck.tail_U_radius = c.optional_number("tail_U_radius");
        ck.tail_R_list = c.numbers("tail_R_list");
        ck.c_check = c.optional_number("c_check");
        if (c.has("far_field_ring")) {
            const Vec2 ring = c.vec2("far_field_ring");
            ck.far_field_ring = std::make_pair(ring.x, ring.y);
        } else {
            c.mark("far_field_ring");
        }
        ck.far_field_bound = c.optional_number("far_field_bound");
        ck.damascelli_samples = c.integer("damascelli_samples", static_cast<int>(ck.damascelli_samples));
        c.finish();
    } else {
        r.mark("checks");
    }
    r.finish();

    if (cfg.domain) {
        const double R = cfg.domain->outer_radius;
        for (double y : cfg.profiles)
            if (!(std::abs(y) < R)) throw ConfigError("config.profiles: y = " + std::to_string(y) + " leaves the domain");
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return parse_run_config(j);
}

json resolved_json(const RunConfig& cfg) {
    json j;
    try {
        j["operator"] = json_io::to_json(cfg.make_spec());
    } catch (const ConfigError&) {
        j["operator"] = cfg.operator_block;
    }
    if (cfg.domain) j["domain"] = json_io::to_json(*cfg.domain);
    j["solver"] = json_io::to_json(cfg.solver);
    if (cfg.domain) j["continuation"] = json_io::to_json(cfg.make_plan());
    j["outputs"] = {{"dir", cfg.outputs.dir.string()},
                    {"artifacts", std::vector<std::string>(cfg.outputs.artifacts.begin(), cfg.outputs.artifacts.end())}};
    j["radial"] = {{"a", json_io::number(cfg.radial.a)},
                   {"s", json_io::number(cfg.radial.s)},
                   {"r_values", cfg.radial.r_values},
                   {"r_min", json_io::number(cfg.radial.r_min)},
                   {"r_max", json_io::number(cfg.radial.r_max)},
                   {"count", cfg.radial.count}};
    j["profiles"] = cfg.profiles;
    const auto& ck = cfg.checks;
    j["checks"] = {{"max_principle_tol", json_io::number(ck.max_principle_tol)},
                   {"sandwich_budget", json_io::number(ck.sandwich_budget)},
                   {"tail_U_radius", ck.tail_U_radius ? json_io::number(*ck.tail_U_radius) : json(nullptr)},
                   {"tail_R_list", ck.tail_R_list},
                   {"c_check", ck.c_check ? json_io::number(*ck.c_check) : json(nullptr)},
                   {"far_field_ring", ck.far_field_ring
                                          ? json::array({ck.far_field_ring->first, ck.far_field_ring->second})
                                          : json(nullptr)},
                   {"far_field_bound", ck.far_field_bound ? json_io::number(*ck.far_field_bound) : json(nullptr)},
                   {"damascelli_samples", ck.damascelli_samples}};
    return j;
}

json figure1_defaults() {
    return {
        {"operator", {{"p", 4.0}, {"n", 2}, {"family", {{"kind", "constant"}, {"value", 1.0}}}}},
        {"domain",
         {{"punctures", json::array({{{"center", {-1.0, 0.0}}, {"value", -1.0}}, {{"center", {1.0, 0.0}}, {"value", 1.0}}})},
          {"hole_radius", 0.1},
          {"outer_radius", 8.0},
          {"outer_value", 0.0},
          {"spacing", 0.05}}},
        {"continuation",
         {{"r_schedule", {0.4, 0.2, 0.1}},
          {"R_schedule", {4.0, 8.0}},
          {"h_rule", {{"fixed", 0.05}}},
          {"probe_region", {{"lo", {-2.0, 0.5}}, {"hi", {2.0, 2.0}}}}}},
        {"outputs", {{"dir", "out/figure1"}, {"artifacts", {"heatmap", "profiles", "report"}}}},
        {"profiles", {0.0, 1.0, 2.0}},
        // Regression bounds recorded from the first run at these settings:
        // observed I(8) / sup|u|^4 = 0.0762 and max |u| on the far ring 0.0849.
        {"checks",
         {{"tail_U_radius", 1.5},
          {"tail_R_list", {2.0, 3.0, 4.0, 6.0, 8.0}},
          {"c_check", 0.08},
          {"far_field_ring", {7.0, 8.0}},
          {"far_field_bound", 0.09}}},
    };
}

}  // namespace plap::cli
