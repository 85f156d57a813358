#include "sparse_align/serialization.hpp"

#include <string>

#include "sparse_align/errors.hpp"

namespace sparse_align {

namespace {

template <typename Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

Matrix matrix_from_json(const json& j) {
  const auto n = j.at("n").get<std::size_t>();
  const auto m = j.at("m").get<std::size_t>();
  auto values = j.at("values").get<std::vector<double>>();
  if (values.size() != n * m) {
    throw FormatError("\"values\" has " + std::to_string(values.size()) + " entries, expected " +
                      std::to_string(n) + "x" + std::to_string(m));
  }
  return Matrix(n, m, std::move(values));
}

json matrix_fields(const Matrix& m) {
  return {{"n", m.rows()},
          {"m", m.cols()},
          {"values", std::vector<double>(m.values().begin(), m.values().end())}};
}

BinaryVector binary_from_json(const json& j) {
  BinaryVector out;
  for (const auto& v : j) {
    const int bit = v.is_boolean() ? static_cast<int>(v.get<bool>()) : v.get<int>();
    if (bit != 0 && bit != 1) throw ParseError("rationale entries must be 0 or 1");
    out.push_back(static_cast<std::uint8_t>(bit));
  }
  return out;
}

}  // namespace

json to_json(const CostMatrix& c) { return matrix_fields(c.values()); }

CostMatrix cost_matrix_from_json(const json& j) {
  return guarded("cost matrix", [&] { return CostMatrix(matrix_from_json(j)); });
}

json to_json(const TransportPlan& p) {
  json out = matrix_fields(p.values());
  out["row_marginal"] = std::vector<double>(p.row_marginal().begin(), p.row_marginal().end());
  out["col_marginal"] = std::vector<double>(p.col_marginal().begin(), p.col_marginal().end());
  return out;
}

TransportPlan plan_from_json(const json& j) {
  return guarded("transport plan", [&] {
    Matrix values = matrix_from_json(j);
    if (!j.contains("row_marginal")) return TransportPlan(std::move(values));
    return TransportPlan(std::move(values), j.at("row_marginal").get<std::vector<double>>(),
                         j.at("col_marginal").get<std::vector<double>>());
  });
}

json to_json(const ConstraintSpec& spec) { return {{"variant", to_string(spec.variant)}, {"k", spec.k}}; }

ConstraintSpec constraint_spec_from_json(const json& j) {
  return guarded("constraint spec", [&] {
    ConstraintSpec spec;
    spec.variant = parse_variant(j.at("variant").get<std::string>());
    spec.k = j.value("k", std::size_t{1});
    return spec;
  });
}

json to_json(const SolverConfig& cfg) {
  return {{"epsilon_final", cfg.epsilon_final},   {"epsilon_start", cfg.epsilon_start},
          {"scaling_factor", cfg.scaling_factor}, {"max_iter", cfg.max_iterations_per_epsilon},
          {"tol", cfg.convergence_tol},           {"log_domain", cfg.log_domain}};
}

SolverConfig solver_config_from_json(const json& j) {
  return guarded("solver config", [&] {
    SolverConfig cfg;
    cfg.epsilon_final = j.value("epsilon_final", cfg.epsilon_final);
    cfg.epsilon_start = j.value("epsilon_start", cfg.epsilon_start);
    cfg.scaling_factor = j.value("scaling_factor", cfg.scaling_factor);
    cfg.max_iterations_per_epsilon = j.value("max_iter", cfg.max_iterations_per_epsilon);
    cfg.convergence_tol = j.value("tol", cfg.convergence_tol);
    cfg.log_domain = j.value("log_domain", cfg.log_domain);
    cfg.validate();
    return cfg;
  });
}

json to_json(const ActivePair& pair) { return {{"i", pair.row}, {"j", pair.col}, {"mass", pair.mass}}; }

json to_json(const ConstrainedAlignment& alignment) {
  json pairs = json::array();
  for (const auto& p : alignment.active_pairs) pairs.push_back(to_json(p));
  return {{"spec", to_json(alignment.spec)},
          {"plan", to_json(alignment.plan)},
          {"active_pairs", std::move(pairs)},
          {"lambda", alignment.lambda},
          {"augmented_cost", alignment.augmented_cost},
          {"original_cost", alignment.original_cost},
          {"solver_converged", alignment.solver_converged},
          {"solver_iterations", alignment.solver_iterations}};
}

json to_json(const RationalePair& r) { return {{"x", r.r_x}, {"y", r.r_y}}; }

RationalePair rationale_from_json(const json& j) {
  return guarded("rationale", [&] { return RationalePair{binary_from_json(j.at("x")), binary_from_json(j.at("y"))}; });
}

}  // namespace sparse_align
