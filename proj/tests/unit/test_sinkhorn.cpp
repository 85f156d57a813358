#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparse_align/errors.hpp"
#include "sparse_align/exact.hpp"
#include "sparse_align/random.hpp"
#include "sparse_align/sinkhorn.hpp"

using namespace sparse_align;

TEST(Sinkhorn, SingleCellIsTheOnlyFeasiblePlan) {
  const auto c = CostMatrix::from_rows({{3}});
  const auto one = Marginals({1.0});
  for (double eps : {1.0, 1e-2, 1e-4}) {
    SolverConfig cfg;
    cfg.epsilon_final = eps;
    cfg.epsilon_start = std::max(eps, 1.0);
    const auto r = sinkhorn_solve(c, one, one, cfg);
    EXPECT_NEAR(r.plan(0, 0), 1.0, 1e-12);
  }
}

TEST(Sinkhorn, ConstantCostGivesOuterProduct) {
  const auto c = CostMatrix::from_rows({{2, 2, 2}, {2, 2, 2}, {2, 2, 2}});
  const auto a = Marginals::uniform(3);
  const auto r = sinkhorn_epsilon_scaled(c, a, a);
  EXPECT_TRUE(r.state.converged);
  for (double x : r.plan.values().values()) EXPECT_NEAR(x, 1.0 / 9.0, 1e-9);
}

TEST(Sinkhorn, AntiDiagonalCostSelectsIdentity) {
  const auto c = CostMatrix::from_rows({{0, 1}, {1, 0}});
  const auto a = Marginals::uniform(2);
  const auto r = sinkhorn_epsilon_scaled(c, a, a);
  EXPECT_NEAR(r.plan(0, 0), 0.5, 1e-3);
  EXPECT_NEAR(r.plan(1, 1), 0.5, 1e-3);
  EXPECT_NEAR(r.plan(0, 1), 0.0, 1e-3);
  EXPECT_NEAR(r.plan(1, 0), 0.0, 1e-3);
  const double oracle_cost = brute_force_assignment(c).cost / 2.0;
  EXPECT_NEAR(transport_cost(c, r.plan), oracle_cost, 1e-3);
}

TEST(Sinkhorn, DefaultFinalEpsilon) { EXPECT_DOUBLE_EQ(SolverConfig{}.epsilon_final, 1e-4); }

TEST(Sinkhorn, DefaultScheduleReachesFinalEpsilon) {
  const auto schedule = epsilon_schedule(SolverConfig{});
  ASSERT_FALSE(schedule.empty());
  EXPECT_DOUBLE_EQ(schedule.front(), 1.0);
  EXPECT_DOUBLE_EQ(schedule.back(), 1e-4);
  for (std::size_t s = 1; s < schedule.size(); ++s) EXPECT_LT(schedule[s], schedule[s - 1]);
}

TEST(Sinkhorn, RandomSixBySixMatchesEnumeratedOptimum) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const CostMatrix c(random_matrix(6, 6, 0.0, 1.0, rng));
    const auto a = Marginals::uniform(6);
    const auto r = sinkhorn_epsilon_scaled(c, a, a);
    EXPECT_NEAR(transport_cost(c, r.plan), oracle::min_assignment_cost(c) / 6.0, 1e-3);
  }
}

TEST(Sinkhorn, DegenerateScheduleEqualsPlainSolve) {
  Rng rng(4);
  const CostMatrix c(random_matrix(5, 4, 0.0, 1.0, rng));
  const auto a = Marginals::uniform(5);
  const auto b = Marginals::uniform(4);
  SolverConfig cfg;
  cfg.epsilon_final = 1e-2;
  cfg.epsilon_start = 1e-2;
  const auto scaled = sinkhorn_epsilon_scaled(c, a, b, cfg);
  const auto plain = sinkhorn_solve(c, a, b, cfg);
  EXPECT_EQ(scaled.plan.values(), plain.plan.values());
  EXPECT_EQ(scaled.state.iterations_used, plain.state.iterations_used);
}

TEST(Sinkhorn, ConvergedPlanMeetsTolerance) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const CostMatrix c(random_matrix(4, 7, 0.0, 1.0, rng));
    const auto a = Marginals::uniform(4);
    const auto b = Marginals::uniform(7);
    const auto r = sinkhorn_epsilon_scaled(c, a, b);
    if (r.state.converged) EXPECT_LT(r.state.max_violation, SolverConfig{}.convergence_tol);
    const auto report = validate_plan(r.plan, a, b, 1e-6);
    EXPECT_TRUE(report.passed);
    EXPECT_GE(report.min_entry, 0.0);
  }
}

TEST(Sinkhorn, SharpensAsEpsilonShrinks) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const CostMatrix c(random_matrix(5, 5, 0.0, 1.0, rng));
    const auto a = Marginals::uniform(5);
    SolverConfig coarse;
    coarse.epsilon_final = 1e-2;
    const double cost_coarse = transport_cost(c, sinkhorn_epsilon_scaled(c, a, a, coarse).plan);
    const double cost_fine = transport_cost(c, sinkhorn_epsilon_scaled(c, a, a).plan);
    EXPECT_GE(cost_coarse, cost_fine - 1e-9);
  }
}

TEST(Sinkhorn, Deterministic) {
  Rng rng(17);
  const CostMatrix c(random_matrix(6, 5, 0.0, 1.0, rng));
  const auto a = Marginals::uniform(6);
  const auto b = Marginals::uniform(5);
  const auto first = sinkhorn_epsilon_scaled(c, a, b);
  const auto second = sinkhorn_epsilon_scaled(c, a, b);
  EXPECT_EQ(first.plan.values(), second.plan.values());
  EXPECT_EQ(first.state.potential_f, second.state.potential_f);
  EXPECT_EQ(first.state.potential_g, second.state.potential_g);
}

TEST(Sinkhorn, SmallSquareOptimalityUpToSeven) {
  Rng rng(29);
  for (std::size_t n = 1; n <= 7; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const CostMatrix c(random_matrix(n, n, 0.0, 1.0, rng));
      const auto a = Marginals::uniform(n);
      const double got = transport_cost(c, sinkhorn_epsilon_scaled(c, a, a).plan);
      EXPECT_NEAR(got, oracle::min_assignment_cost(c) / static_cast<double>(n), 1e-3);
    }
  }
}

TEST(Sinkhorn, LinearDomainAgreesAtModerateEpsilon) {
  Rng rng(31);
  const CostMatrix c(random_matrix(4, 4, 0.0, 1.0, rng));
  const auto a = Marginals::uniform(4);
  SolverConfig cfg;
  cfg.epsilon_final = 5e-2;
  const auto log_plan = sinkhorn_epsilon_scaled(c, a, a, cfg).plan;
  cfg.log_domain = false;
  const auto lin = sinkhorn_epsilon_scaled(c, a, a, cfg);
  EXPECT_TRUE(validate_plan(lin.plan, a, a).passed);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(lin.plan(i, j), log_plan(i, j), 1e-6);
  for (double u : lin.state.u()) EXPECT_GT(u, 0.0);
  for (double v : lin.state.v()) EXPECT_GT(v, 0.0);
}

TEST(Sinkhorn, IterationBudgetRespected) {
  Rng rng(37);
  const CostMatrix c(random_matrix(6, 6, 0.0, 1.0, rng));
  const auto a = Marginals::uniform(6);
  SolverConfig cfg;
  cfg.max_iterations_per_epsilon = 10;
  const auto r = sinkhorn_epsilon_scaled(c, a, a, cfg);
  EXPECT_LE(r.state.iterations_used, 10 * epsilon_schedule(cfg).size());
  EXPECT_TRUE(validate_plan(r.plan, a, a).passed);
}

TEST(Sinkhorn, ShapeMismatchThrows) {
  const auto c = CostMatrix::from_rows({{1, 2}});
  EXPECT_THROW(sinkhorn_solve(c, Marginals::uniform(2), Marginals::uniform(2)), ShapeError);
}

TEST(Sinkhorn, BadConfigThrows) {
  const auto c = CostMatrix::from_rows({{1}});
  SolverConfig cfg;
  cfg.epsilon_final = -1.0;
  EXPECT_THROW(sinkhorn_solve(c, Marginals({1.0}), Marginals({1.0}), cfg), InputError);
}
