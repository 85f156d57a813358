#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sparse_align/constraint_spec.hpp"
#include "sparse_align/exact.hpp"
#include "sparse_align/ot_core.hpp"

namespace sparse_align {

enum class PointKind { Original, Replica, Dummy };

// Where a row or column of an augmented problem came from. `source` is the
// original point index for Original and Replica tags and unused for Dummy.
struct PointTag {
  PointKind kind = PointKind::Original;
  std::size_t source = 0;
  std::size_t copy = 0;

  bool operator==(const PointTag&) const = default;
};

// Square uniform problem built from replica and dummy points. Vanilla is the
// exception: it passes the original n x m problem through with uniform
// marginals 1/n and 1/m.
struct AugmentedProblem {
  CostMatrix c_hat;
  Marginals a_hat;
  Marginals b_hat;
  std::vector<PointTag> row_kind;
  std::vector<PointTag> col_kind;
  std::size_t n_original = 0;
  std::size_t m_original = 0;
  ConstraintSpec spec;

  std::size_t size() const { return c_hat.rows(); }
};

enum class SignCheck { Enforce, Skip };

// Builds the augmented problem for spec. Requires n <= m (solve_constrained
// transposes for you). Rows are laid out as all copies of x_0, then x_1, ...,
// followed by dummy rows; columns are the original y_j followed by dummies.
//
//   OneToK        N = m:      k*n replica rows, m - k*n dummy rows
//   RelaxedOneToK N = m + kn: k*n replicas + m dummy rows; m originals + kn dummy cols
//   ExactK        N = n+m-k:  n originals + m-k dummy rows; m originals + n-k dummy cols
//
// Dummies cost 0 against everything. Throws BoundError for a bad k,
// InputError for n > m, and ConstraintSignError when ExactK sees a cost
// <= 0 or RelaxedOneToK sees costs of a single sign (unless check is Skip).
AugmentedProblem augment(const CostMatrix& c, const ConstraintSpec& spec,
                         SignCheck check = SignCheck::Enforce);

struct RoundedAssignment {
  Permutation perm;
  double captured_fraction;  // plan mass on the chosen entries / total mass
};

inline constexpr double kMinCapturedFraction = 0.9;

// Greedy rounding of a square plan: take entries largest first (ties by
// lower row, then lower column), discarding any whose row or column is
// already used. Throws RoundingError if the chosen entries carry less than
// 90% of the plan's mass, which means epsilon_final is too large for the plan
// to be near a permutation.
RoundedAssignment round_to_assignment(const TransportPlan& p_hat);

// Maps an augmented plan back to the n x m original problem, summing replica
// rows and dropping dummies. The result keeps its realized (possibly partial)
// mass; nothing is renormalized.
TransportPlan extract(const TransportPlan& p_hat, const AugmentedProblem& problem);

struct ActivePair {
  std::size_t row;
  std::size_t col;
  double mass;

  bool operator==(const ActivePair&) const = default;
};

// 0.01 / (n * m).
double default_lambda(std::size_t n, std::size_t m);

// Entries strictly above lambda in row-major order. lambda defaults to
// default_lambda for the plan's shape.
std::vector<ActivePair> active_alignments(const TransportPlan& p,
                                          std::optional<double> lambda = std::nullopt);

struct ConstrainedAlignment {
  TransportPlan plan;  // n x m, caller's orientation
  std::vector<ActivePair> active_pairs;
  ConstraintSpec spec;
  double lambda = 0.0;
  double augmented_cost = 0.0;  // <C_hat, rounded plan> on the augmented problem
  double original_cost = 0.0;   // sum over active pairs of C_ij * mass
  bool solver_converged = false;
  std::size_t solver_iterations = 0;
};

// augment -> epsilon-scaled Sinkhorn -> purify_to_vertex -> round_to_assignment
// -> extract. Vanilla skips the assignment step and returns the purified
// vertex of U(1/n, 1/m). Inputs with n > m are transposed for the
// construction and transposed back.
ConstrainedAlignment solve_constrained(const CostMatrix& c, const ConstraintSpec& spec,
                                       const SolverConfig& cfg = {},
                                       std::optional<double> lambda = std::nullopt);

}  // namespace sparse_align
