#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sparse_align/errors.hpp"
#include "sparse_align/exact.hpp"
#include "sparse_align/ot_core.hpp"
#include "sparse_align/random.hpp"
#include "sparse_align/sinkhorn.hpp"

using namespace sparse_align;

namespace {

TransportPlan plan_of(const std::vector<std::vector<double>>& rows) {
  return TransportPlan(Matrix::from_rows(rows));
}

}  // namespace

TEST(Marginals, RejectsBadWeights) {
  EXPECT_THROW(Marginals({0.5, 0.4}), InputError);
  EXPECT_THROW(Marginals({1.5, -0.5}), InputError);
  EXPECT_THROW(Marginals(std::vector<double>{}), InputError);
  EXPECT_NO_THROW(Marginals({0.25, 0.75}));
  EXPECT_DOUBLE_EQ(Marginals::uniform(4)[3], 0.25);
}

TEST(CostMatrix, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(CostMatrix::from_rows({{1.0, std::nan("")}}), InputError);
  EXPECT_THROW(CostMatrix::from_rows({{1.0, INFINITY}}), InputError);
  EXPECT_THROW(CostMatrix(Matrix(0, 3)), InputError);
  EXPECT_THROW(CostMatrix::from_rows({{1.0, 2.0}, {3.0}}), ShapeError);
}

TEST(TransportCost, OneByOne) {
  EXPECT_DOUBLE_EQ(transport_cost(CostMatrix::from_rows({{5}}), plan_of({{1}})), 5.0);
}

TEST(TransportCost, DiagonalHalfMass) {
  const auto c = CostMatrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_DOUBLE_EQ(transport_cost(c, plan_of({{0.5, 0}, {0, 0.5}})), 2.5);
}

TEST(TransportCost, ShapeMismatchThrows) {
  const auto c = CostMatrix::from_rows({{1, 2}, {3, 4}});
  EXPECT_THROW(transport_cost(c, plan_of({{1}})), ShapeError);
}

TEST(TransportCost, PermutationPlanMatchesEnumeratedMinimum) {
  Rng rng(11);
  const CostMatrix c(random_matrix(4, 4, 0.0, 1.0, rng));
  const auto best = brute_force_assignment(c);
  const TransportPlan p(best.perm.to_matrix(1.0));
  EXPECT_NEAR(transport_cost(c, p), oracle::min_assignment_cost(c), 1e-12);
}

TEST(TransportCost, Bilinear) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const CostMatrix c(random_matrix(3, 5, -1.0, 1.0, rng));
    const TransportPlan p(random_matrix(3, 5, 0.0, 1.0, rng));
    const double alpha = rng.uniform(-3.0, 3.0);
    EXPECT_NEAR(transport_cost(c.scaled(alpha), p), alpha * transport_cost(c, p), 1e-12);
  }
}

TEST(Entropy, SingleEntry) { EXPECT_DOUBLE_EQ(entropy(plan_of({{1}})), 1.0); }

TEST(Entropy, UniformTwoByTwo) {
  // -4 * 0.25 * (log 0.25 - 1) = 1 + log 4
  EXPECT_NEAR(entropy(plan_of({{0.25, 0.25}, {0.25, 0.25}})), 1.0 + std::log(4.0), 1e-15);
  EXPECT_NEAR(entropy(plan_of({{0.25, 0.25}, {0.25, 0.25}})), 2.3863, 1e-4);
}

TEST(Entropy, ZeroEntryContributesNothing) {
  const double h = entropy(plan_of({{0.5, 0.0}, {0.0, 0.5}}));
  EXPECT_TRUE(std::isfinite(h));
  EXPECT_NEAR(h, -2 * 0.5 * (std::log(0.5) - 1.0), 1e-15);
}

TEST(ValidatePlan, PassesOnFeasiblePlan) {
  const auto a = Marginals({0.5, 0.5});
  const auto r = validate_plan(plan_of({{0.5, 0}, {0, 0.5}}), a, a, 1e-9);
  EXPECT_TRUE(r.passed);
}

TEST(ValidatePlan, ReportsRowViolation) {
  const auto a = Marginals({0.5, 0.5});
  const auto r = validate_plan(plan_of({{1, 0}, {0, 0}}), a, a, 1e-9);
  EXPECT_FALSE(r.passed);
  EXPECT_DOUBLE_EQ(r.max_row_violation, 0.5);
}

TEST(ValidatePlan, ShapeMismatchThrows) {
  EXPECT_THROW(validate_plan(plan_of({{1}}), Marginals({0.5, 0.5}), Marginals({1.0})), ShapeError);
}

TEST(ValidatePlan, SinkhornOutputOnRandom6x4) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const CostMatrix c(random_matrix(6, 4, 0.0, 1.0, rng));
    const auto a = Marginals::uniform(6);
    const auto b = Marginals::uniform(4);
    const auto solved = sinkhorn_epsilon_scaled(c, a, b);
    EXPECT_TRUE(validate_plan(solved.plan, a, b, 1e-6).passed);
  }
}

TEST(ValidatePlan, EntriesBoundedByLargestMarginal) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const CostMatrix c(random_matrix(5, 3, 0.0, 1.0, rng));
    std::vector<double> wa(5);
    double total = 0.0;
    for (double& w : wa) total += (w = rng.uniform(0.1, 1.0));
    for (double& w : wa) w /= total;
    const Marginals a(wa);
    const auto b = Marginals::uniform(3);
    const auto p = sinkhorn_epsilon_scaled(c, a, b).plan;
    const double cap = std::min(*std::max_element(wa.begin(), wa.end()), 1.0 / 3.0);
    for (double x : p.values().values()) EXPECT_LE(x, cap + p.feasibility_tol());
  }
}

TEST(TransportPlan, MarginalConstructorChecksFeasibility) {
  EXPECT_THROW(TransportPlan(Matrix::from_rows({{1, 0}, {0, 0}}), {0.5, 0.5}, {0.5, 0.5}), InputError);
  EXPECT_THROW(TransportPlan(Matrix::from_rows({{-0.1, 0}})), InputError);
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.epsilon_start = 1e-5;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = {};
  cfg.scaling_factor = 1.0;
  EXPECT_THROW(cfg.validate(), InputError);
  cfg = {};
  cfg.epsilon_final = 0.0;
  EXPECT_THROW(cfg.validate(), InputError);
}
