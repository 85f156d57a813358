#include "sparse_align/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sparse_align/errors.hpp"
#include "sparse_align/random.hpp"

namespace sparse_align {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + " needs a square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Kuhn's augmenting-path matching restricted to entries above tol, trying
// columns in increasing order.
class SupportMatcher {
 public:
  SupportMatcher(const Matrix& w, double tol)
      : w_(w), tol_(tol), col_owner_(w.cols(), kNone), seen_(w.cols(), false) {}

  // mapping[row] = col, or empty if no perfect matching exists.
  std::vector<std::size_t> perfect_matching() {
    for (std::size_t r = 0; r < w_.rows(); ++r) {
      std::fill(seen_.begin(), seen_.end(), false);
      if (!augment(r)) return {};
    }
    std::vector<std::size_t> mapping(w_.rows());
    for (std::size_t c = 0; c < w_.cols(); ++c) mapping[col_owner_[c]] = c;
    return mapping;
  }

 private:
  bool augment(std::size_t r) {
    for (std::size_t c = 0; c < w_.cols(); ++c) {
      if (w_(r, c) <= tol_ || seen_[c]) continue;
      seen_[c] = true;
      if (col_owner_[c] == kNone || augment(col_owner_[c])) {
        col_owner_[c] = r;
        return true;
      }
    }
    return false;
  }

  const Matrix& w_;
  double tol_;
  std::vector<std::size_t> col_owner_;
  std::vector<bool> seen_;
};

// Union-find over the n + m vertices of the bipartite support graph.
struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
  std::vector<std::size_t> parent;
};

struct Edge {
  std::size_t row;
  std::size_t col;
};

// Returns the edges of one cycle in the support of p (first closing edge in
// row-major order, then the forest path back), or empty if the support is a
// forest.
std::vector<Edge> find_support_cycle(const Matrix& p) {
  const std::size_t n = p.rows();
  const std::size_t m = p.cols();
  DisjointSets sets(n + m);
  std::vector<std::vector<std::size_t>> adjacency(n + m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (p(i, j) <= 0.0) continue;
      if (sets.unite(i, n + j)) {
        adjacency[i].push_back(n + j);
        adjacency[n + j].push_back(i);
        continue;
      }
      // (i, j) closes a cycle: walk the forest from column j back to row i.
      std::vector<std::size_t> parent(n + m, kNone);
      std::vector<std::size_t> frontier{n + j};
      parent[n + j] = n + j;
      for (std::size_t head = 0; head < frontier.size() && parent[i] == kNone; ++head) {
        const std::size_t x = frontier[head];
        for (std::size_t y : adjacency[x]) {
          if (parent[y] != kNone) continue;
          parent[y] = x;
          frontier.push_back(y);
        }
      }
      std::vector<Edge> cycle{{i, j}};
      for (std::size_t x = i; x != n + j; x = parent[x]) {
        const std::size_t y = parent[x];
        cycle.push_back(x < n ? Edge{x, y - n} : Edge{y, x - n});
      }
      return cycle;
    }
  }
  return {};
}

}  // namespace

Permutation::Permutation(std::vector<std::size_t> mapping) : mapping_(std::move(mapping)) {
  std::vector<bool> used(mapping_.size(), false);
  for (std::size_t c : mapping_) {
    if (c >= mapping_.size() || used[c]) throw InputError("permutation mapping is not a bijection");
    used[c] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Matrix Permutation::to_matrix(double mass) const {
  Matrix out(size(), size());
  for (std::size_t i = 0; i < size(); ++i) out(i, mapping_[i]) = mass;
  return out;
}

double Permutation::cost(const CostMatrix& c) const {
  if (c.rows() != size() || c.cols() != size()) throw ShapeError("permutation and cost matrix sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) total += c(i, mapping_[i]);
  return total;
}

AssignmentRanking brute_force_assignment_ranking(const CostMatrix& c) {
  require_square(c.values(), "brute_force_assignment");
  const std::size_t n = c.rows();
  if (n > kMaxAssignmentOracleSize) {
    throw SizeError("brute_force_assignment is limited to N <= 9, got " + std::to_string(n));
  }
  std::vector<std::size_t> mapping(n);
  std::iota(mapping.begin(), mapping.end(), 0);
  std::vector<std::size_t> best = mapping;
  double best_cost = kInf;
  double second_cost = kInf;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += c(i, mapping[i]);
    if (total < best_cost) {
      second_cost = best_cost;
      best_cost = total;
      best = mapping;
    } else if (total < second_cost) {
      second_cost = total;
    }
  } while (std::next_permutation(mapping.begin(), mapping.end()));
  return {Permutation(std::move(best)), best_cost, second_cost};
}

AssignmentSolution brute_force_assignment(const CostMatrix& c) {
  auto ranking = brute_force_assignment_ranking(c);
  return {std::move(ranking.best), ranking.best_cost};
}

ConstrainedSupport brute_force_constrained(const CostMatrix& c, const ConstraintSpec& spec) {
  if (spec.variant == Variant::Vanilla) {
    throw InputError("brute_force_constrained: vanilla OT is not a combinatorial family");
  }
  const bool flip = c.rows() > c.cols();
  const CostMatrix oriented = flip ? c.transposed() : c;
  const std::size_t n = oriented.rows();
  const std::size_t m = oriented.cols();
  if (n > kMaxConstrainedOracleRows || m > kMaxConstrainedOracleCols) {
    throw SizeError("brute_force_constrained is limited to 4x6 after orientation, got " +
                    std::to_string(n) + "x" + std::to_string(m));
  }
  spec.validate_for(n, m);

  // owner[j] in {0..n-1} assigns column j to that row; n leaves it unused.
  std::vector<std::size_t> owner(m, 0);
  std::vector<std::size_t> best_owner;
  double best_cost = kInf;
  std::vector<std::size_t> per_row(n);
  while (true) {
    std::fill(per_row.begin(), per_row.end(), 0);
    std::size_t used = 0;
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (owner[j] == n) continue;
      ++per_row[owner[j]];
      ++used;
      total += oriented(owner[j], j);
    }
    bool ok = true;
    switch (spec.variant) {
      case Variant::OneToK:
        ok = std::all_of(per_row.begin(), per_row.end(), [&](std::size_t x) { return x == spec.k; });
        break;
      case Variant::RelaxedOneToK:
        ok = std::all_of(per_row.begin(), per_row.end(), [&](std::size_t x) { return x <= spec.k; });
        break;
      case Variant::ExactK:
        ok = used == spec.k &&
             std::all_of(per_row.begin(), per_row.end(), [](std::size_t x) { return x <= 1; });
        break;
      case Variant::Vanilla:
        ok = false;
        break;
    }
    if (ok && total < best_cost) {
      best_cost = total;
      best_owner = owner;
    }
    std::size_t pos = 0;
    while (pos < m && owner[pos] == n) owner[pos++] = 0;
    if (pos == m) break;
    ++owner[pos];
  }
  if (best_owner.empty()) throw BoundError("constrained family is empty for this shape");

  ConstrainedSupport out{{}, best_cost};
  for (std::size_t j = 0; j < m; ++j) {
    if (best_owner[j] == n) continue;
    out.pairs.emplace_back(flip ? j : best_owner[j], flip ? best_owner[j] : j);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

double BirkhoffDecomposition::weight_sum() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.weight;
  return s;
}

Matrix BirkhoffDecomposition::reconstruct() const {
  if (terms.empty()) return {};
  const std::size_t n = terms.front().perm.size();
  Matrix out(n, n);
  for (const auto& t : terms)
    for (std::size_t i = 0; i < n; ++i) out(i, t.perm[i]) += t.weight / static_cast<double>(n);
  return out;
}

BirkhoffDecomposition birkhoff_decompose(const TransportPlan& p, double tol) {
  require_square(p.values(), "birkhoff_decompose");
  const std::size_t n = p.rows();
  const double scale = static_cast<double>(n);
  Matrix remaining = p.values();
  for (double& x : remaining.values()) x *= scale;

  BirkhoffDecomposition out;
  while (remaining.sum() / scale >= tol) {
    auto mapping = SupportMatcher(remaining, tol).perfect_matching();
    if (mapping.empty()) {
      throw DecompositionError("no perfect matching on the support with " +
                               std::to_string(remaining.sum() / scale) +
                               " mass left; input is not doubly stochastic within tol");
    }
    double weight = kInf;
    for (std::size_t i = 0; i < n; ++i) weight = std::min(weight, remaining(i, mapping[i]));
    for (std::size_t i = 0; i < n; ++i) {
      double& x = remaining(i, mapping[i]);
      x = x == weight ? 0.0 : x - weight;
    }
    out.terms.push_back({weight, Permutation(std::move(mapping))});
  }

  const Matrix rebuilt = out.reconstruct();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = rebuilt.rows() == 0 ? 0.0 : rebuilt(i, j);
      out.residual_norm = std::max(out.residual_norm, std::abs(p(i, j) - r));
    }
  return out;
}

CostMatrix perturb_costs(const CostMatrix& c, double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw InputError("perturb_costs: epsilon must be > 0");
  Rng rng(seed);
  Matrix out = c.values();
  for (double& v : out.values()) v += epsilon * rng.uniform();
  return CostMatrix(std::move(out));
}

PerturbationReport verify_perturbed_optimum(const CostMatrix& c, double epsilon, std::uint64_t seed) {
  require_square(c.values(), "verify_perturbed_optimum");
  if (c.rows() > 7) throw SizeError("verify_perturbed_optimum is limited to N <= 7");
  const double n = static_cast<double>(c.rows());
  const auto base = brute_force_assignment(c);
  const auto perturbed = brute_force_assignment_ranking(perturb_costs(c, epsilon, seed));

  PerturbationReport report;
  report.base_cost = base.cost / n;
  report.perturbed_cost = perturbed.best.cost(c) / n;
  report.gap = report.perturbed_cost - report.base_cost;
  report.gap_within_bound = report.gap >= -1e-12 && report.gap <= epsilon + 1e-12;
  report.unique = perturbed.second_cost - perturbed.best_cost > 1e-12;
  report.is_permutation = true;
  report.perturbed_optimum = perturbed.best;
  return report;
}

SparsityReport check_sparsity_bound(const TransportPlan& p, double lambda) {
  SparsityReport report;
  for (double x : p.values().values())
    if (x > lambda) ++report.count;
  report.bound = p.rows() + p.cols() - 1;
  report.passed = report.count <= report.bound;
  return report;
}

namespace {

// Recomputes the entries of a forest-supported plan from its marginals by
// peeling leaves. Cycle cancelling leaves rounding dust (1e-30 and the like)
// on edges that are zero at the exact vertex; re-solving the forest and
// dropping what stays below kDust clears it.
void resolve_forest(Matrix& x, std::span<const double> row, std::span<const double> col) {
  constexpr double kDust = 1e-13;
  const std::size_t n = x.rows();
  const std::size_t m = x.cols();
  std::vector<std::vector<std::size_t>> adj(n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (x(i, j) > 0.0) {
        adj[i].push_back(n + j);
        adj[n + j].push_back(i);
      }
  std::vector<double> remaining(row.begin(), row.end());
  remaining.insert(remaining.end(), col.begin(), col.end());
  std::vector<std::size_t> degree(n + m);
  std::vector<std::size_t> leaves;
  for (std::size_t u = 0; u < n + m; ++u) {
    degree[u] = adj[u].size();
    if (degree[u] == 1) leaves.push_back(u);
  }
  std::vector<char> done(n * m, 0);
  while (!leaves.empty()) {
    const std::size_t u = leaves.back();
    leaves.pop_back();
    if (degree[u] != 1) continue;
    for (std::size_t v : adj[u]) {
      const std::size_t i = u < n ? u : v;
      const std::size_t j = (u < n ? v : u) - n;
      if (done[i * m + j]) continue;
      const double value = std::max(0.0, remaining[u]);
      x(i, j) = value;
      done[i * m + j] = 1;
      remaining[u] = 0.0;
      remaining[v] -= value;
      --degree[u];
      if (--degree[v] == 1) leaves.push_back(v);
      break;
    }
  }
  for (double& v : x.values())
    if (v < kDust) v = 0.0;
}

}  // namespace

TransportPlan purify_to_vertex(const TransportPlan& p, const CostMatrix& c) {
  if (c.rows() != p.rows() || c.cols() != p.cols()) throw ShapeError("purify_to_vertex: cost and plan shapes differ");
  Matrix x = p.values();
  for (auto cycle = find_support_cycle(x); !cycle.empty(); cycle = find_support_cycle(x)) {
    // Even positions gain mass, odd positions lose it; flip if that raises cost.
    double delta = 0.0;
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      const double ct = c(cycle[t].row, cycle[t].col);
      delta += t % 2 == 0 ? ct : -ct;
    }
    const std::size_t losing_parity = delta > 0.0 ? 0 : 1;
    double step = kInf;
    std::size_t pivot = 0;
    for (std::size_t t = losing_parity; t < cycle.size(); t += 2) {
      const double v = x(cycle[t].row, cycle[t].col);
      if (v < step) {
        step = v;
        pivot = t;
      }
    }
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      double& v = x(cycle[t].row, cycle[t].col);
      if (t % 2 == losing_parity) {
        v = std::max(0.0, v - step);
      } else {
        v += step;
      }
    }
    x(cycle[pivot].row, cycle[pivot].col) = 0.0;
  }
  resolve_forest(x, p.row_marginal(), p.col_marginal());
  std::vector<double> row(p.row_marginal().begin(), p.row_marginal().end());
  std::vector<double> col(p.col_marginal().begin(), p.col_marginal().end());
  return TransportPlan(std::move(x), std::move(row), std::move(col),
                       std::max(p.feasibility_tol(), 1e-9));
}

}  // namespace sparse_align
