#pragma once

#include <json.hpp>

#include "plap/continuation.hpp"
#include "plap/operator_model.hpp"
#include "plap/punctured_mesh.hpp"
#include "plap/solver.hpp"

// JSON blocks of the run configuration. Readers reject unknown keys and
// mistyped values with ConfigError naming the offending path; writers emit
// every field, so their output is the fully resolved configuration.
namespace plap::json_io {

using nlohmann::json;

OperatorSpec operator_from_json(const json& j);
json to_json(const OperatorSpec& spec);

AFamily family_from_json(const json& j, const std::string& path = "operator.family");
json to_json(const AFamily& family);

DomainConfig domain_from_json(const json& j);
json to_json(const DomainConfig& cfg);

SolverParams solver_from_json(const json& j);
json to_json(const SolverParams& params);

/// The base domain is taken from the separate domain block.
ContinuationPlan plan_from_json(const json& j, const DomainConfig& base);
json to_json(const ContinuationPlan& plan);

json to_json(const MaxPrincipleReport& r);
json to_json(const SandwichReport& r);
json to_json(const LiouvilleReport& r);
json to_json(const DamascelliReport& r);

/// finite doubles as numbers, anything else as a string ("nan", "inf").
json number(double v);

}  // namespace plap::json_io
