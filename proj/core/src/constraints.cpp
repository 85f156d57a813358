#include "sparse_align/constraints.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sparse_align/errors.hpp"
#include "sparse_align/sinkhorn.hpp"

namespace sparse_align {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Vanilla: return "vanilla";
    case Variant::OneToK: return "one_to_k";
    case Variant::RelaxedOneToK: return "relaxed_one_to_k";
    case Variant::ExactK: return "exact_k";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "vanilla") return Variant::Vanilla;
  if (name == "one_to_k") return Variant::OneToK;
  if (name == "relaxed_one_to_k") return Variant::RelaxedOneToK;
  if (name == "exact_k") return Variant::ExactK;
  throw InputError("unknown constraint variant '" + std::string(name) + "'");
}

void ConstraintSpec::validate_for(std::size_t n, std::size_t m) const {
  const auto fail = [&](const std::string& why) {
    throw BoundError(to_string(variant) + ": k=" + std::to_string(k) + " " + why + " (n=" +
                     std::to_string(n) + ", m=" + std::to_string(m) + ")");
  };
  switch (variant) {
    case Variant::Vanilla:
      return;
    case Variant::OneToK:
      if (k < 1 || k > m / n) fail("must lie in [1, floor(m/n)]");
      return;
    case Variant::RelaxedOneToK:
      if (k < 1) fail("must be >= 1");
      return;
    case Variant::ExactK:
      if (k < 1 || k > n) fail("must lie in [1, n]");
      return;
  }
}

AugmentedProblem augment(const CostMatrix& c, const ConstraintSpec& spec, SignCheck check) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  if (spec.variant == Variant::Vanilla) {
    std::vector<PointTag> rows(n), cols(m);
    for (std::size_t i = 0; i < n; ++i) rows[i] = {PointKind::Original, i, 0};
    for (std::size_t j = 0; j < m; ++j) cols[j] = {PointKind::Original, j, 0};
    return {c, Marginals::uniform(n), Marginals::uniform(m), std::move(rows), std::move(cols), n, m, spec};
  }
  if (n > m) {
    throw InputError("augment expects n <= m (got " + std::to_string(n) + "x" + std::to_string(m) +
                     "); transpose the cost matrix first");
  }
  spec.validate_for(n, m);
  if (check == SignCheck::Enforce) {
    if (spec.variant == Variant::ExactK && c.min() <= 0.0) {
      throw ConstraintSignError("exact_k requires strictly positive costs (min is " +
                                std::to_string(c.min()) + ")");
    }
    if (spec.variant == Variant::RelaxedOneToK && !(c.min() < 0.0 && c.max() > 0.0)) {
      throw ConstraintSignError("relaxed_one_to_k requires both negative and positive costs");
    }
  }

  std::vector<PointTag> rows;
  std::vector<PointTag> cols;
  const std::size_t copies = spec.variant == Variant::ExactK ? 1 : spec.k;
  const PointKind copy_kind = spec.variant == Variant::ExactK ? PointKind::Original : PointKind::Replica;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < copies; ++r) rows.push_back({copy_kind, i, r});
  for (std::size_t j = 0; j < m; ++j) cols.push_back({PointKind::Original, j, 0});

  std::size_t dummy_rows = 0;
  std::size_t dummy_cols = 0;
  switch (spec.variant) {
    case Variant::OneToK:
      dummy_rows = m - spec.k * n;
      break;
    case Variant::RelaxedOneToK:
      dummy_rows = m;
      dummy_cols = spec.k * n;
      break;
    case Variant::ExactK:
      dummy_rows = m - spec.k;
      dummy_cols = n - spec.k;
      break;
    case Variant::Vanilla:
      break;
  }
  for (std::size_t d = 0; d < dummy_rows; ++d) rows.push_back({PointKind::Dummy, 0, d});
  for (std::size_t d = 0; d < dummy_cols; ++d) cols.push_back({PointKind::Dummy, 0, d});

  const std::size_t big_n = rows.size();
  Matrix c_hat(big_n, big_n, 0.0);
  for (std::size_t r = 0; r < big_n; ++r) {
    if (rows[r].kind == PointKind::Dummy) continue;
    for (std::size_t q = 0; q < big_n; ++q) {
      if (cols[q].kind == PointKind::Dummy) continue;
      c_hat(r, q) = c(rows[r].source, cols[q].source);
    }
  }
  return {CostMatrix(std::move(c_hat)), Marginals::uniform(big_n), Marginals::uniform(big_n),
          std::move(rows), std::move(cols), n, m, spec};
}

RoundedAssignment round_to_assignment(const TransportPlan& p_hat) {
  const std::size_t n = p_hat.rows();
  if (p_hat.cols() != n) throw ShapeError("round_to_assignment needs a square plan");
  std::vector<std::size_t> order(n * n);
  std::iota(order.begin(), order.end(), 0);
  const auto values = p_hat.values().values();
  // Row-major index order already encodes "lower row, then lower column".
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });

  std::vector<std::size_t> mapping(n, n);
  std::vector<bool> col_used(n, false);
  std::size_t assigned = 0;
  double captured = 0.0;
  for (std::size_t idx : order) {
    const std::size_t i = idx / n;
    const std::size_t j = idx % n;
    if (mapping[i] != n || col_used[j]) continue;
    mapping[i] = j;
    col_used[j] = true;
    captured += values[idx];
    if (++assigned == n) break;
  }
  const double total = p_hat.mass();
  const double fraction = total > 0.0 ? captured / total : 0.0;
  if (fraction < kMinCapturedFraction) {
    throw RoundingError("plan too diffuse to round: greedy assignment captures " +
                        std::to_string(fraction) + " of the mass; use a smaller epsilon_final");
  }
  return {Permutation(std::move(mapping)), fraction};
}

TransportPlan extract(const TransportPlan& p_hat, const AugmentedProblem& problem) {
  if (p_hat.rows() != problem.row_kind.size() || p_hat.cols() != problem.col_kind.size()) {
    throw ShapeError("extract: plan does not match the augmented problem");
  }
  Matrix out(problem.n_original, problem.m_original);
  for (std::size_t r = 0; r < p_hat.rows(); ++r) {
    const auto& rt = problem.row_kind[r];
    if (rt.kind == PointKind::Dummy) continue;
    for (std::size_t q = 0; q < p_hat.cols(); ++q) {
      const auto& ct = problem.col_kind[q];
      if (ct.kind == PointKind::Dummy) continue;
      out(rt.source, ct.source) += p_hat(r, q);
    }
  }
  return TransportPlan(std::move(out));
}

double default_lambda(std::size_t n, std::size_t m) {
  return 0.01 / (static_cast<double>(n) * static_cast<double>(m));
}

std::vector<ActivePair> active_alignments(const TransportPlan& p, std::optional<double> lambda) {
  const double threshold = lambda.value_or(default_lambda(p.rows(), p.cols()));
  if (threshold < 0.0) throw InputError("active threshold lambda must be >= 0");
  std::vector<ActivePair> out;
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j)
      if (p(i, j) > threshold) out.push_back({i, j, p(i, j)});
  return out;
}

ConstrainedAlignment solve_constrained(const CostMatrix& c, const ConstraintSpec& spec,
                                       const SolverConfig& cfg, std::optional<double> lambda) {
  const bool flip = spec.variant != Variant::Vanilla && c.rows() > c.cols();
  const CostMatrix oriented = flip ? c.transposed() : c;
  const AugmentedProblem problem = augment(oriented, spec);

  const auto solved = sinkhorn_epsilon_scaled(problem.c_hat, problem.a_hat, problem.b_hat, cfg);
  const TransportPlan vertex = purify_to_vertex(solved.plan, problem.c_hat);

  ConstrainedAlignment out{TransportPlan(Matrix(1, 1)), {}, spec};
  out.solver_converged = solved.state.converged;
  out.solver_iterations = solved.state.iterations_used;

  TransportPlan oriented_plan = vertex;
  if (spec.variant == Variant::Vanilla) {
    out.augmented_cost = transport_cost(problem.c_hat, vertex);
  } else {
    const auto rounded = round_to_assignment(vertex);
    const double mass = 1.0 / static_cast<double>(problem.size());
    const TransportPlan assignment(rounded.perm.to_matrix(mass));
    out.augmented_cost = transport_cost(problem.c_hat, assignment);
    oriented_plan = extract(assignment, problem);
  }

  out.plan = flip ? oriented_plan.transposed() : oriented_plan;
  out.lambda = lambda.value_or(default_lambda(c.rows(), c.cols()));
  out.active_pairs = active_alignments(out.plan, out.lambda);
  for (const auto& pair : out.active_pairs) out.original_cost += c(pair.row, pair.col) * pair.mass;
  return out;
}

}  // namespace sparse_align
