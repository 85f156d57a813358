#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sparse_align/constraints.hpp"
#include "sparse_align/errors.hpp"
#include "sparse_align/random.hpp"
#include "sparse_align/rationale.hpp"

using namespace sparse_align;

namespace {

TransportPlan plan_of(const std::vector<std::vector<double>>& rows) {
  return TransportPlan(Matrix::from_rows(rows));
}

}  // namespace

TEST(Binarize, ZeroPlan) {
  const auto r = binarize(TransportPlan(Matrix(2, 3)), 0.0);
  EXPECT_EQ(r.r_x, (BinaryVector{0, 0}));
  EXPECT_EQ(r.r_y, (BinaryVector{0, 0, 0}));
}

TEST(Binarize, IdentityOverThree) {
  const auto r = binarize(TransportPlan(Permutation::identity(3).to_matrix(1.0 / 3.0)), 0.1);
  EXPECT_EQ(r.r_x, (BinaryVector{1, 1, 1}));
  EXPECT_EQ(r.r_y, (BinaryVector{1, 1, 1}));
}

TEST(Binarize, ThresholdStraddling) {
  const auto p = plan_of({{0, 0, 0.2}, {0, 0, 0}});
  const auto high = binarize(p, 0.25);
  EXPECT_EQ(high.r_x, (BinaryVector{0, 0}));
  EXPECT_EQ(high.r_y, (BinaryVector{0, 0, 0}));
  const auto low = binarize(p, 0.1);
  EXPECT_EQ(low.r_x, (BinaryVector{1, 0}));
  EXPECT_EQ(low.r_y, (BinaryVector{0, 0, 1}));
}

TEST(Binarize, NegativeDeltaRejected) {
  EXPECT_THROW(binarize(plan_of({{1}}), -0.1), InputError);
}

TEST(Binarize, MonotoneInDelta) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const TransportPlan p(random_matrix(3, 4, 0.0, 0.2, rng));
    double d1 = rng.uniform(0.0, 0.2);
    double d2 = rng.uniform(0.0, 0.2);
    if (d1 > d2) std::swap(d1, d2);
    const auto loose = binarize(p, d1);
    const auto tight = binarize(p, d2);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(tight.r_x[i], loose.r_x[i]);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_LE(tight.r_y[j], loose.r_y[j]);
  }
}

TEST(SoftRationales, PermutationPlan) {
  const auto s = soft_rationales(TransportPlan(Permutation({1, 2, 0}).to_matrix(1.0 / 3.0)));
  for (double x : s.s_x) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
  for (double y : s.s_y) EXPECT_DOUBLE_EQ(y, 1.0 / 3.0);
}

TEST(SoftRationales, Arithmetic) {
  const auto s = soft_rationales(plan_of({{0.5, 0}, {0.25, 0.25}}));
  EXPECT_EQ(s.s_x, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(s.s_y, (std::vector<double>{0.75, 0.25}));
}

TEST(SoftRationales, ExactKPlanHasKNonzeroRows) {
  Rng rng(5);
  const CostMatrix c(random_matrix(3, 4, 0.1, 1.0, rng));
  const auto s = soft_rationales(solve_constrained(c, {Variant::ExactK, 2}).plan);
  EXPECT_EQ(std::count_if(s.s_x.begin(), s.s_x.end(), [](double v) { return v > 0.0; }), 2);
}

TEST(TokenF1, Cases) {
  EXPECT_DOUBLE_EQ(token_f1(BinaryVector{1, 0, 1}, BinaryVector{1, 0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(token_f1(BinaryVector{1, 1, 0, 0}, BinaryVector{1, 0, 1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(token_f1(BinaryVector{0, 0, 0}, BinaryVector{0, 1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(token_f1(BinaryVector{0, 0}, BinaryVector{0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(token_f1(BinaryVector{1, 0}, BinaryVector{0, 1}), 0.0);
  EXPECT_THROW(token_f1(BinaryVector{1}, BinaryVector{1, 0}), ShapeError);
}

TEST(TokenF1, Symmetric) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    BinaryVector a(6), b(6);
    for (auto& x : a) x = static_cast<std::uint8_t>(rng.index(2));
    for (auto& x : b) x = static_cast<std::uint8_t>(rng.index(2));
    EXPECT_DOUBLE_EQ(token_f1(a, b), token_f1(b, a));
  }
}

TEST(SelectDelta, PicksBestGridPoint) {
  const std::vector<TransportPlan> plans{plan_of({{0.3, 0}, {0, 0}})};
  const std::vector<RationalePair> golds{{{1, 0}, {1, 0}}};
  const std::vector<double> grid{0.1, 0.5};
  EXPECT_DOUBLE_EQ(select_delta(plans, golds, grid), 0.1);
}

TEST(SelectDelta, TiesGoToSmallerDelta) {
  const std::vector<TransportPlan> plans{plan_of({{0.5, 0}, {0, 0.5}})};
  const std::vector<RationalePair> golds{{{1, 1}, {1, 1}}};
  const std::vector<double> grid{0.3, 0.2, 0.1};
  EXPECT_DOUBLE_EQ(select_delta(plans, golds, grid), 0.1);
}

TEST(SelectDelta, ReturnsExhaustiveArgmax) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TransportPlan> plans;
    std::vector<RationalePair> golds;
    for (int d = 0; d < 3; ++d) {
      plans.emplace_back(random_matrix(3, 4, 0.0, 0.1, rng));
      RationalePair g{BinaryVector(3), BinaryVector(4)};
      for (auto& x : g.r_x) x = static_cast<std::uint8_t>(rng.index(2));
      for (auto& x : g.r_y) x = static_cast<std::uint8_t>(rng.index(2));
      golds.push_back(g);
    }
    const auto grid = default_delta_grid(3, 4);
    const double chosen = select_delta(plans, golds, grid);
    const double best = mean_rationale_f1(plans, golds, chosen);
    for (double d : grid) EXPECT_GE(best, mean_rationale_f1(plans, golds, d));
  }
}

TEST(SelectDelta, EmptyInputs) {
  const std::vector<TransportPlan> plans{plan_of({{1}})};
  const std::vector<RationalePair> golds{{{1}, {1}}};
  EXPECT_THROW(select_delta(plans, golds, std::vector<double>{}), InputError);
  EXPECT_THROW(select_delta(std::vector<TransportPlan>{}, std::vector<RationalePair>{}, std::vector<double>{0.1}),
               InputError);
}

TEST(DefaultDeltaGrid, LogSpaced) {
  const auto grid = default_delta_grid(4, 5);
  ASSERT_EQ(grid.size(), 20u);
  EXPECT_NEAR(grid.front(), 1e-4 / 20.0, 1e-18);
  EXPECT_NEAR(grid.back(), 1.0, 1e-12);
  const double ratio = grid[1] / grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_NEAR(grid[i] / grid[i - 1], ratio, 1e-9);
}

TEST(SufficiencyMask, Cases) {
  const auto sparse = plan_of({{0.5, 0}, {0, 0.5}});
  EXPECT_EQ(sufficiency_mask(sparse, 0.01).values(), sparse.values());
  const auto uniform = plan_of({{0.25, 0.25}, {0.25, 0.25}});
  EXPECT_EQ(sufficiency_mask(uniform, 0.3).values(), Matrix(2, 2));
}

TEST(SufficiencyMask, IdempotentAndNonIncreasing) {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const TransportPlan p(random_matrix(4, 3, 0.0, 0.2, rng));
    const double lambda = rng.uniform(0.0, 0.2);
    const auto once = sufficiency_mask(p, lambda);
    EXPECT_EQ(sufficiency_mask(once, lambda).values(), once.values());
    for (std::size_t i = 0; i < p.values().size(); ++i)
      EXPECT_LE(once.values().values()[i], p.values().values()[i]);
  }
}

TEST(SufficiencyMask, ExactKScoreUnchanged) {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const CostMatrix c(random_matrix(4, 6, 0.1, 1.0, rng));
    const auto out = solve_constrained(c, {Variant::ExactK, 2});
    const auto masked = sufficiency_mask(out.plan, out.lambda);
    EXPECT_EQ(transport_cost(c, masked), transport_cost(c, out.plan));
  }
}

TEST(HingeLoss, Cases) {
  EXPECT_DOUBLE_EQ(hinge_contrastive_loss(0.2, std::vector<double>{0.9}, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(hinge_contrastive_loss(0.8, std::vector<double>{0.5, 0.9}, 0.2), 0.8 - 0.5 + 0.2);
  EXPECT_DOUBLE_EQ(hinge_contrastive_loss(0.4, std::vector<double>{0.4}, 0.0), 0.0);
  EXPECT_THROW(hinge_contrastive_loss(0.1, std::vector<double>{}, 0.1), InputError);
  EXPECT_THROW(hinge_contrastive_loss(0.1, std::vector<double>{0.2}, -0.1), InputError);
}

TEST(HingeLoss, NonNegativeAndMonotone) {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> negs{rng.uniform(), rng.uniform(), rng.uniform()};
    const double pos = rng.uniform();
    const double margin = rng.uniform(0.0, 0.5);
    const double base = hinge_contrastive_loss(pos, negs, margin);
    EXPECT_GE(base, 0.0);
    EXPECT_GE(hinge_contrastive_loss(pos + 0.1, negs, margin), base);
    EXPECT_GE(hinge_contrastive_loss(pos, negs, margin + 0.1), base);
  }
}

TEST(CombinedLoss, Cases) {
  EXPECT_DOUBLE_EQ(kDefaultLossAlpha, 0.2);
  EXPECT_NEAR(combined_loss(1.0, 0.5), 0.6, 1e-15);
  EXPECT_EQ(combined_loss(0.123, 0.456, 1.0), 0.123);
  EXPECT_EQ(combined_loss(0.123, 0.456, 0.0), 0.456);
  EXPECT_THROW(combined_loss(1.0, 1.0, 1.5), InputError);
  EXPECT_THROW(combined_loss(1.0, 1.0, -0.1), InputError);
}

TEST(CrossEntropy, PerfectPredictionIsTiny) {
  const SoftRationales soft{{1.0, 0.0}, {0.0, 1.0, 1.0}};
  const double loss = rationale_cross_entropy(soft, BinaryVector{1, 0}, BinaryVector{0, 1, 1});
  EXPECT_LE(loss, -std::log(1.0 - kProbabilityClip) + 1e-12);
}

TEST(CrossEntropy, HalfIsLogTwo) {
  const SoftRationales soft{{0.5, 0.5}, {0.5}};
  EXPECT_NEAR(rationale_cross_entropy(soft, BinaryVector{1, 0}, BinaryVector{1}), std::log(2.0), 1e-15);
}

TEST(CrossEntropy, FlippingGoldIncreasesLoss) {
  const SoftRationales soft{{0.95, 0.05, 0.9}, {0.1, 0.8}};
  const BinaryVector gx{1, 0, 1};
  const BinaryVector gy{0, 1};
  const double base = rationale_cross_entropy(soft, gx, gy);
  for (std::size_t i = 0; i < gx.size(); ++i) {
    BinaryVector flipped = gx;
    flipped[i] ^= 1;
    EXPECT_GT(rationale_cross_entropy(soft, flipped, gy), base);
  }
}

TEST(CrossEntropy, ShapeMismatch) {
  const SoftRationales soft{{0.5}, {0.5}};
  EXPECT_THROW(rationale_cross_entropy(soft, BinaryVector{1, 0}, BinaryVector{1}), ShapeError);
}
