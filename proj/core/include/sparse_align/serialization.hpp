#pragma once

#include <nlohmann/json.hpp>

#include "sparse_align/constraints.hpp"
#include "sparse_align/ot_core.hpp"
#include "sparse_align/rationale.hpp"

namespace sparse_align {

using json = nlohmann::json;

// {"n", "m", "values": [row-major]}
json to_json(const CostMatrix& c);
CostMatrix cost_matrix_from_json(const json& j);

// Cost matrix layout plus "row_marginal" and "col_marginal".
json to_json(const TransportPlan& p);
TransportPlan plan_from_json(const json& j);

// {"variant": "exact_k", "k": 2}
json to_json(const ConstraintSpec& spec);
ConstraintSpec constraint_spec_from_json(const json& j);

// {"epsilon_final", "epsilon_start", "scaling_factor", "max_iter", "tol",
// "log_domain"}; missing keys keep their defaults.
json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const json& j);

json to_json(const ActivePair& pair);
json to_json(const ConstrainedAlignment& alignment);

// {"x": [0/1...], "y": [0/1...]}
json to_json(const RationalePair& r);
RationalePair rationale_from_json(const json& j);

}  // namespace sparse_align
