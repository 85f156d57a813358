#include <gtest/gtest.h>

#include <cmath>

#include "sparse_align/constraints.hpp"
#include "sparse_align/errors.hpp"
#include "sparse_align/metrics.hpp"
#include "sparse_align/random.hpp"

using namespace sparse_align;

namespace {

// Scores descend with position, so the list order is the ranking.
RankedList ranked(std::vector<bool> relevance) {
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < relevance.size(); ++i)
    cands.push_back({"c" + std::to_string(i), -static_cast<double>(i), relevance[i]});
  return RankedList("q", cands);
}

}  // namespace

TEST(RankedList, SortsByScoreThenId) {
  const RankedList list("q", {{"b", 1.0, false}, {"a", 1.0, true}, {"c", 2.0, false}});
  EXPECT_EQ(list.candidates()[0].id, "c");
  EXPECT_EQ(list.candidates()[1].id, "a");
  EXPECT_EQ(list.candidates()[2].id, "b");
  EXPECT_THROW(RankedList("q", {}), InputError);
}

TEST(ScorePair, Cases) {
  const auto c = CostMatrix::from_rows({{0, 1}, {1, 0}});
  const TransportPlan matched(Matrix::from_rows({{0.5, 0}, {0, 0.5}}));
  const TransportPlan crossed(Matrix::from_rows({{0, 0.5}, {0.5, 0}}));
  EXPECT_EQ(score_pair(c, matched), 0.0);
  EXPECT_LT(score_pair(c, crossed), score_pair(c, matched));
}

TEST(ScorePair, PlantedSimilarityOrder) {
  Rng rng(3);
  const CostMatrix base(random_matrix(4, 4, 0.0, 1.0, rng));
  std::vector<double> scores;
  for (double offset : {0.0, 0.5, 1.0}) {
    const auto c = base.shifted(offset);
    scores.push_back(score_pair(c, solve_constrained(c, {}).plan));
  }
  EXPECT_GT(scores[0], scores[1]);
  EXPECT_GT(scores[1], scores[2]);
}

TEST(RankingMetrics, RelevantFirst) {
  const auto list = ranked({true, false, false});
  EXPECT_DOUBLE_EQ(average_precision(list), 1.0);
  EXPECT_DOUBLE_EQ(reciprocal_rank(list), 1.0);
  EXPECT_DOUBLE_EQ(precision_at_1(list), 1.0);
  EXPECT_DOUBLE_EQ(auc(list), 1.0);
}

TEST(RankingMetrics, RelevantSecond) {
  const auto list = ranked({false, true, false});
  EXPECT_DOUBLE_EQ(reciprocal_rank(list), 0.5);
  EXPECT_DOUBLE_EQ(precision_at_1(list), 0.0);
  EXPECT_DOUBLE_EQ(average_precision(list), 0.5);
  EXPECT_DOUBLE_EQ(auc(list), 0.5);
}

TEST(RankingMetrics, TwoRelevantAtOneAndThree) {
  EXPECT_DOUBLE_EQ(average_precision(ranked({true, false, true, false})), 5.0 / 6.0);
}

TEST(RankingMetrics, AucTiesCountHalf) {
  const RankedList list("q", {{"a", 1.0, true}, {"b", 1.0, false}});
  EXPECT_DOUBLE_EQ(auc(list), 0.5);
}

TEST(RankingMetrics, SkipsQueriesWithoutRelevant) {
  const std::vector<RankedList> lists{ranked({true, false}), ranked({false, false}), ranked({true, true})};
  const auto map = mean_average_precision(lists);
  EXPECT_EQ(map.evaluated, 2u);
  EXPECT_EQ(map.skipped, 1u);
  EXPECT_DOUBLE_EQ(map.value, 1.0);
  const auto a = mean_auc(lists);
  EXPECT_EQ(a.evaluated, 1u);
  EXPECT_EQ(a.skipped, 2u);
}

TEST(RankingMetrics, RangesAndOrdering) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RankedList> lists;
    for (int q = 0; q < 4; ++q) {
      std::vector<Candidate> cands;
      for (int c = 0; c < 5; ++c)
        cands.push_back({"c" + std::to_string(c), rng.uniform(), rng.index(3) == 0});
      lists.emplace_back("q" + std::to_string(q), cands);
    }
    const auto report = evaluate_rankings(lists);
    for (const auto* m : {&report.auc, &report.map, &report.mrr, &report.p_at_1}) {
      EXPECT_GE(m->value, 0.0);
      EXPECT_LE(m->value, 1.0);
    }
    EXPECT_LE(report.p_at_1.value, report.mrr.value + 1e-15);
  }
}

TEST(RankingMetrics, InvariantUnderMonotoneTransform) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Candidate> cands;
    for (int c = 0; c < 6; ++c) cands.push_back({"c" + std::to_string(c), rng.uniform(), rng.index(2) == 0});
    auto transformed = cands;
    for (auto& c : transformed) c.score = std::exp(3.0 * c.score) - 7.0;
    const std::vector<RankedList> a{RankedList("q", cands)};
    const std::vector<RankedList> b{RankedList("q", transformed)};
    const auto ra = evaluate_rankings(a);
    const auto rb = evaluate_rankings(b);
    EXPECT_EQ(ra.map.value, rb.map.value);
    EXPECT_EQ(ra.mrr.value, rb.mrr.value);
    EXPECT_EQ(ra.p_at_1.value, rb.p_at_1.value);
    EXPECT_EQ(ra.auc.value, rb.auc.value);
  }
}

TEST(RankingMetrics, PerfectRankingGivesOnes) {
  const std::vector<RankedList> lists{ranked({true, true, false}), ranked({true, false, false, false})};
  const auto r = evaluate_rankings(lists);
  EXPECT_DOUBLE_EQ(r.map.value, 1.0);
  EXPECT_DOUBLE_EQ(r.mrr.value, 1.0);
  EXPECT_DOUBLE_EQ(r.p_at_1.value, 1.0);
}

TEST(SparsityStats, ExactKBatch) {
  Rng rng(13);
  std::vector<TransportPlan> plans;
  for (int i = 0; i < 5; ++i) {
    const CostMatrix c(random_matrix(3 + i % 2, 5, 0.1, 1.0, rng));
    plans.push_back(solve_constrained(c, {Variant::ExactK, 2}).plan);
  }
  EXPECT_DOUBLE_EQ(sparsity_stats(plans).mean_active_count, 2.0);
}

TEST(SparsityStats, PercentPerPlan) {
  Matrix a(4, 5);
  for (std::size_t i = 0; i < 4; ++i) a(i, i) = 0.25;
  const std::vector<TransportPlan> one{TransportPlan(a)};
  EXPECT_DOUBLE_EQ(sparsity_stats(one).mean_active_percent, 0.2);

  Matrix b(2, 2);
  b(0, 0) = 0.5;
  b(1, 1) = 0.5;
  const std::vector<TransportPlan> two{TransportPlan(a), TransportPlan(b)};
  const auto stats = sparsity_stats(two);
  // (4/20 + 2/4) / 2, not pooled 6/24.
  EXPECT_DOUBLE_EQ(stats.mean_active_percent, 0.35);
  EXPECT_DOUBLE_EQ(stats.mean_active_count, 3.0);
  EXPECT_EQ(stats.plans, 2u);
}
