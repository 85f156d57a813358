#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "sparse_align/ot_core.hpp"

namespace sparse_align {

// Solver state after a run. The scalings live in log form as dual potentials
// f, g with u = exp(f / eps) and v = exp(g / eps), so they survive the small
// epsilons where u and v themselves would overflow.
struct SinkhornState {
  std::vector<double> potential_f;
  std::vector<double> potential_g;
  double epsilon_current = 0.0;
  std::size_t iterations_used = 0;
  std::size_t stages = 0;
  // Max-norm marginal violation of the unprojected plan at the last check.
  double max_violation = 0.0;
  bool converged = false;

  std::vector<double> u() const;
  std::vector<double> v() const;
};

struct SinkhornResult {
  TransportPlan plan;
  SinkhornState state;
};

// Entropic OT at the single value cfg.epsilon_final.
//
// The returned plan is diag(u) K diag(v) with K = exp(-C / eps), followed by a
// final projection onto U(a, b) that moves at most the residual marginal
// error, so it always passes validate_plan. state.converged reports whether
// the unprojected iterate reached cfg.convergence_tol within budget.
//
// Throws ShapeError on dimension mismatch and InputError on a bad config.
SinkhornResult sinkhorn_solve(const CostMatrix& c, const Marginals& a, const Marginals& b,
                              const SolverConfig& cfg = {});

// Runs sinkhorn_solve at epsilon_start, epsilon_start * scaling_factor, ...
// down to epsilon_final, warm-starting each stage from the previous potentials.
SinkhornResult sinkhorn_epsilon_scaled(const CostMatrix& c, const Marginals& a,
                                       const Marginals& b, const SolverConfig& cfg = {});

// The epsilon values sinkhorn_epsilon_scaled visits, in order.
std::vector<double> epsilon_schedule(const SolverConfig& cfg);

}  // namespace sparse_align
