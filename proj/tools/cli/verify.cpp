#include "cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "cli/parallel.hpp"
#include "sparse_align/constraints.hpp"
#include "sparse_align/errors.hpp"
#include "sparse_align/exact.hpp"
#include "sparse_align/random.hpp"
#include "sparse_align/sinkhorn.hpp"

namespace sparse_align::cli {

namespace {

constexpr double kCostTol = 1e-3;
constexpr double kBirkhoffTol = 1e-8;
constexpr double kOptimalTol = 1e-9;

struct Outcome {
  bool pass = false;
  double gap = 0.0;
};

using Trial = std::function<Outcome(Rng&, std::size_t)>;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.index(hi - lo + 1); }

CostMatrix mixed_sign(std::size_t n, std::size_t m, Rng& rng) {
  for (;;) {
    CostMatrix c(random_matrix(n, m, -1.0, 1.0, rng));
    if (c.min() < 0.0 && c.max() > 0.0) return c;
  }
}

bool is_scaled_permutation(const TransportPlan& p) {
  const double mass = 1.0 / static_cast<double>(p.rows());
  std::vector<int> rows(p.rows()), cols(p.cols());
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const double v = p(i, j);
      if (v == 0.0) continue;
      if (std::abs(v - mass) > 1e-9) return false;
      ++rows[i];
      ++cols[j];
    }
  }
  return std::all_of(rows.begin(), rows.end(), [](int r) { return r == 1; }) &&
         std::all_of(cols.begin(), cols.end(), [](int c) { return c == 1; });
}

Outcome vanilla_sparsity(Rng& rng, std::size_t max_size) {
  const std::size_t n = between(rng, 1, max_size + 2);
  const std::size_t m = between(rng, 1, max_size + 2);
  const CostMatrix c(random_matrix(n, m, 0.0, 1.0, rng));
  const auto out = solve_constrained(c, {});
  const auto report = check_sparsity_bound(out.plan, default_lambda(n, m));
  return {report.passed, static_cast<double>(report.count) - static_cast<double>(report.bound)};
}

Outcome vanilla_permutation(Rng& rng, std::size_t max_size) {
  const std::size_t n = between(rng, 1, max_size);
  const CostMatrix c(random_matrix(n, n, 0.0, 1.0, rng));
  const auto out = solve_constrained(c, {});
  const double gap =
      std::abs(transport_cost(c, out.plan) - brute_force_assignment(c).cost / static_cast<double>(n));
  return {is_scaled_permutation(out.plan) && gap <= kCostTol, gap};
}

Outcome constrained(Rng& rng, std::size_t, Variant variant) {
  const std::size_t n = between(rng, 1, kMaxConstrainedOracleRows);
  const std::size_t m = between(rng, n, kMaxConstrainedOracleCols);
  ConstraintSpec spec{variant, 1};
  CostMatrix c(Matrix(1, 1, 1.0));
  switch (variant) {
    case Variant::OneToK:
      spec.k = between(rng, 1, m / n);
      c = CostMatrix(random_matrix(n, m, 0.01, 1.0, rng));
      break;
    case Variant::RelaxedOneToK:
      spec.k = between(rng, 1, 3);
      c = mixed_sign(n, std::max<std::size_t>(m, 2), rng);
      break;
    case Variant::ExactK:
      spec.k = between(rng, 1, n);
      c = CostMatrix(random_matrix(n, m, 0.01, 1.0, rng));
      break;
    case Variant::Vanilla:
      break;
  }
  const auto got = solve_constrained(c, spec);
  const auto want = brute_force_constrained(c, spec);

  std::vector<std::size_t> per_row(n);
  std::set<std::size_t> cols;
  double support_cost = 0.0;
  bool structure = true;
  for (const auto& pair : got.active_pairs) {
    ++per_row[pair.row];
    structure &= cols.insert(pair.col).second;
    support_cost += c(pair.row, pair.col);
  }
  const std::size_t count = got.active_pairs.size();
  switch (variant) {
    case Variant::OneToK:
      structure &= count == spec.k * n &&
                   std::all_of(per_row.begin(), per_row.end(), [&](std::size_t r) { return r == spec.k; });
      break;
    case Variant::RelaxedOneToK:
      structure &= count <= spec.k * n &&
                   std::all_of(per_row.begin(), per_row.end(), [&](std::size_t r) { return r <= spec.k; });
      break;
    case Variant::ExactK:
      structure &= count == spec.k && std::all_of(per_row.begin(), per_row.end(),
                                                  [](std::size_t r) { return r <= 1; });
      break;
    case Variant::Vanilla:
      break;
  }
  const double gap = std::abs(support_cost - want.cost);
  return {structure && gap <= kCostTol, gap};
}

CostMatrix perturbation_instance(Rng& rng, std::size_t max_size) {
  const std::size_t n = between(rng, 2, max_size);
  return CostMatrix(random_matrix(n, n, 0.0, 1.0, rng));
}

double perturbation_epsilon(std::size_t trial) { return trial % 2 == 0 ? 1e-2 : 1e-3; }

Outcome perturbation_gap_trial(Rng& rng, std::size_t max_size, std::size_t trial) {
  const auto c = perturbation_instance(rng, max_size);
  const auto report = verify_perturbed_optimum(c, perturbation_epsilon(trial), rng.next());
  return {report.gap_within_bound && report.is_permutation, report.gap};
}

Outcome perturbation_unique_trial(Rng& rng, std::size_t max_size, std::size_t trial) {
  const auto c = perturbation_instance(rng, max_size);
  const auto report = verify_perturbed_optimum(c, perturbation_epsilon(trial), rng.next());
  return {report.unique, 0.0};
}

Matrix random_mixture(Rng& rng, std::size_t n, const std::vector<Permutation>& perms) {
  std::vector<double> w(perms.size());
  double total = 0.0;
  for (double& x : w) total += (x = rng.uniform(0.05, 1.0));
  Matrix m(n, n);
  for (std::size_t t = 0; t < perms.size(); ++t)
    for (std::size_t i = 0; i < n; ++i) m(i, perms[t][i]) += w[t] / total / static_cast<double>(n);
  return m;
}

Permutation random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);
  return Permutation(std::move(p));
}

Outcome birkhoff_reconstruct(Rng& rng, std::size_t max_size) {
  const std::size_t n = between(rng, 1, max_size);
  std::vector<Permutation> perms;
  for (std::size_t t = 0, count = between(rng, 1, 4); t < count; ++t) perms.push_back(random_permutation(rng, n));
  const Matrix m = random_mixture(rng, n, perms);
  const auto d = birkhoff_decompose(TransportPlan(m));
  const Matrix back = d.reconstruct();
  double residual = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    residual = std::max(residual, std::abs(back.values()[i] - m.values()[i]));
  const double weight_gap = std::abs(d.weight_sum() - 1.0);
  return {residual <= kBirkhoffTol && weight_gap <= kBirkhoffTol, std::max(residual, weight_gap)};
}

// Costs are 1 + u off the chosen supports and 0 on them, so every chosen
// permutation is optimal and any plan mixing them is an optimal plan.
Outcome birkhoff_optimal(Rng& rng, std::size_t max_size) {
  const std::size_t n = between(rng, 2, max_size);
  std::vector<Permutation> perms;
  for (std::size_t t = 0, count = between(rng, 2, 4); t < count; ++t) perms.push_back(random_permutation(rng, n));
  Matrix costs = random_matrix(n, n, 1.0, 2.0, rng);
  for (const auto& p : perms)
    for (std::size_t i = 0; i < n; ++i) costs(i, p[i]) = 0.0;
  const CostMatrix c(std::move(costs));
  const double optimum = brute_force_assignment(c).cost;
  const auto d = birkhoff_decompose(TransportPlan(random_mixture(rng, n, perms)));
  double worst = 0.0;
  for (const auto& term : d.terms) worst = std::max(worst, std::abs(term.perm.cost(c) - optimum));
  return {worst <= kOptimalTol, worst};
}

Outcome sinkhorn_feasibility(Rng& rng, std::size_t max_size) {
  const std::size_t n = between(rng, 1, max_size + 2);
  const std::size_t m = between(rng, 1, max_size + 2);
  const CostMatrix c(random_matrix(n, m, 0.0, 1.0, rng));
  const auto a = Marginals::uniform(n);
  const auto b = Marginals::uniform(m);
  const auto first = sinkhorn_epsilon_scaled(c, a, b);
  const auto second = sinkhorn_epsilon_scaled(c, a, b);
  const auto report = validate_plan(first.plan, a, b, kDefaultFeasibilityTol);
  const double violation = std::max(report.max_row_violation, report.max_col_violation);
  return {report.passed && first.plan.values() == second.plan.values(), violation};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  if (options.trials == 0) throw InputError("verify needs at least one trial");
  if (options.max_size < 2 || options.max_size > 7) throw InputError("verify max size must lie in [2, 7]");
  const std::size_t size = options.max_size;

  struct Check {
    std::string name;
    Trial trial;
    std::size_t allowed_failures;
  };
  const std::vector<Check> checks = {
      {"vanilla_sparsity_bound", [size](Rng& r, std::size_t) { return vanilla_sparsity(r, size); }, 0},
      {"vanilla_square_permutation", [size](Rng& r, std::size_t) { return vanilla_permutation(r, size); }, 0},
      {"one_to_k_oracle", [size](Rng& r, std::size_t) { return constrained(r, size, Variant::OneToK); }, 0},
      {"relaxed_one_to_k_oracle",
       [size](Rng& r, std::size_t) { return constrained(r, size, Variant::RelaxedOneToK); }, 0},
      {"exact_k_oracle", [size](Rng& r, std::size_t) { return constrained(r, size, Variant::ExactK); }, 0},
      {"perturbation_gap", [size](Rng& r, std::size_t t) { return perturbation_gap_trial(r, size, t); }, 0},
      {"perturbation_unique", [size](Rng& r, std::size_t t) { return perturbation_unique_trial(r, size, t); },
       options.trials / 1000},
      {"birkhoff_reconstruction", [size](Rng& r, std::size_t) { return birkhoff_reconstruct(r, size); }, 0},
      {"birkhoff_optimal_terms", [size](Rng& r, std::size_t) { return birkhoff_optimal(r, size); }, 0},
      {"sinkhorn_feasibility_determinism",
       [size](Rng& r, std::size_t) { return sinkhorn_feasibility(r, size); }, 0},
  };

  std::vector<CheckResult> results;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    std::vector<Outcome> outcomes(options.trials);
    // The two perturbation checks share instances.
    const std::uint64_t stream = checks[k].name == "perturbation_unique" ? k - 1 : k;
    parallel_for(options.trials, options.workers, [&](std::size_t t) {
      Rng rng(splitmix(options.seed ^ splitmix(stream * 0x100000000ULL + t)));
      outcomes[t] = checks[k].trial(rng, t);
    });
    CheckResult r{checks[k].name, options.trials, 0, 0.0, checks[k].allowed_failures};
    for (const auto& o : outcomes) {
      r.passes += o.pass ? 1 : 0;
      r.worst_gap = std::max(r.worst_gap, o.gap);
    }
    results.push_back(std::move(r));
  }
  return results;
}

json to_json(const CheckResult& check) {
  return {{"name", check.name},
          {"trials", check.trials},
          {"passes", check.passes},
          {"worst_gap", check.worst_gap},
          {"allowed_failures", check.allowed_failures},
          {"passed", check.passed()}};
}

}  // namespace sparse_align::cli
