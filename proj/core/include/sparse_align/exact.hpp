#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "sparse_align/constraint_spec.hpp"
#include "sparse_align/ot_core.hpp"

namespace sparse_align {

// Bijection on {0, ..., N-1}; mapping[i] is the column assigned to row i.
class Permutation {
 public:
  // Throws InputError unless mapping is a bijection.
  explicit Permutation(std::vector<std::size_t> mapping);
  static Permutation identity(std::size_t n);

  std::size_t size() const { return mapping_.size(); }
  std::size_t operator[](std::size_t i) const { return mapping_[i]; }
  const std::vector<std::size_t>& mapping() const { return mapping_; }

  // N x N matrix with `mass` at (i, mapping[i]) and zeros elsewhere.
  Matrix to_matrix(double mass = 1.0) const;
  // sum_i C[i, mapping[i]].
  double cost(const CostMatrix& c) const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<std::size_t> mapping_;
};

inline constexpr std::size_t kMaxAssignmentOracleSize = 9;
inline constexpr std::size_t kMaxConstrainedOracleRows = 4;
inline constexpr std::size_t kMaxConstrainedOracleCols = 6;

struct AssignmentSolution {
  Permutation perm;
  double cost;  // sum over the permutation, not divided by N
};

// Exhaustive minimum over all N! permutations; ties go to the
// lexicographically smallest mapping. Throws SizeError for N > 9 and
// ShapeError for non-square input.
AssignmentSolution brute_force_assignment(const CostMatrix& c);

struct AssignmentRanking {
  Permutation best;
  double best_cost;
  // Cost of the cheapest permutation other than `best` (equal to best_cost on ties).
  double second_cost;
};

AssignmentRanking brute_force_assignment_ranking(const CostMatrix& c);

struct ConstrainedSupport {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // sorted (row, col)
  double cost;
};

// Exhaustive optimum of a constrained family:
//   OneToK        every row gets exactly k distinct columns, columns disjoint
//   RelaxedOneToK every row gets at most k columns, unused columns cost 0
//   ExactK        partial matchings with exactly k pairs
// Inputs with n > m are transposed for the search and reported in the caller's
// orientation. Throws SizeError beyond 4 x 6 (after orientation) and
// InputError for Vanilla, which is not a combinatorial family.
ConstrainedSupport brute_force_constrained(const CostMatrix& c, const ConstraintSpec& spec);

struct BirkhoffTerm {
  double weight;
  Permutation perm;
};

struct BirkhoffDecomposition {
  std::vector<BirkhoffTerm> terms;
  // Max-norm distance between the input plan and sum_t weight_t P^perm_t / N.
  double residual_norm = 0.0;

  double weight_sum() const;
  // sum_t weight_t * perm_t / N.
  Matrix reconstruct() const;
};

// Birkhoff's algorithm on N * p: repeatedly find a perfect matching among the
// entries above tol, peel off the smallest matched entry times that
// permutation, and stop once the remaining mass drops below tol. Matchings
// come from augmenting paths that prefer the lowest column index.
//
// Throws ShapeError for non-square p and DecompositionError when mass remains
// but the support admits no perfect matching.
BirkhoffDecomposition birkhoff_decompose(const TransportPlan& p, double tol = 1e-9);

// C + E with E_ij iid U[0, epsilon) drawn from Rng(seed).
CostMatrix perturb_costs(const CostMatrix& c, double epsilon, std::uint64_t seed);

struct PerturbationReport {
  double base_cost = 0.0;       // <C, P*> with 1/N-mass permutation plans
  double perturbed_cost = 0.0;  // <C, P^eps*>
  double gap = 0.0;             // perturbed_cost - base_cost
  bool gap_within_bound = false;  // 0 <= gap <= epsilon (up to 1e-12 rounding)
  bool unique = false;            // perturbed optimum beats runner-up by > 1e-12
  bool is_permutation = true;
  Permutation perturbed_optimum = Permutation::identity(0);
};

// Solves the assignment on C and on perturb_costs(C, epsilon, seed) by
// enumeration and compares them. Square inputs with N <= 7 only.
PerturbationReport verify_perturbed_optimum(const CostMatrix& c, double epsilon, std::uint64_t seed);

struct SparsityReport {
  std::size_t count = 0;  // entries strictly above lambda
  std::size_t bound = 0;  // n + m - 1
  bool passed = false;
};

SparsityReport check_sparsity_bound(const TransportPlan& p, double lambda);

// Moves a feasible plan to a vertex of its transport polytope without raising
// its cost: while the support graph has a cycle, shift mass around the cycle
// in the non-increasing cost direction until one entry hits zero. The result
// keeps the input's marginals and has forest support, so at most n + m - 1
// nonzeros; for square uniform marginals it is a permutation matrix / N.
TransportPlan purify_to_vertex(const TransportPlan& p, const CostMatrix& c);

}  // namespace sparse_align
