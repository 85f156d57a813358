#include "sparse_align/metrics.hpp"

#include <algorithm>

#include "sparse_align/constraints.hpp"
#include "sparse_align/errors.hpp"

namespace sparse_align {

RankedList::RankedList(std::string query_id, std::vector<Candidate> candidates)
    : query_id_(std::move(query_id)), candidates_(std::move(candidates)) {
  if (candidates_.empty()) throw InputError("ranked list for query '" + query_id_ + "' is empty");
  std::sort(candidates_.begin(), candidates_.end(), [](const Candidate& x, const Candidate& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.id < y.id;
  });
}

std::size_t RankedList::num_relevant() const {
  return static_cast<std::size_t>(
      std::count_if(candidates_.begin(), candidates_.end(), [](const Candidate& c) { return c.relevant; }));
}

double score_pair(const CostMatrix& c, const TransportPlan& p) { return 0.0 - transport_cost(c, p); }

double average_precision(const RankedList& list) {
  double sum = 0.0;
  std::size_t hits = 0;
  const auto& cands = list.candidates();
  for (std::size_t r = 0; r < cands.size(); ++r) {
    if (!cands[r].relevant) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

double reciprocal_rank(const RankedList& list) {
  const auto& cands = list.candidates();
  for (std::size_t r = 0; r < cands.size(); ++r)
    if (cands[r].relevant) return 1.0 / static_cast<double>(r + 1);
  return 0.0;
}

double precision_at_1(const RankedList& list) { return list.candidates().front().relevant ? 1.0 : 0.0; }

double auc(const RankedList& list) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (const auto& pos : list.candidates()) {
    if (!pos.relevant) continue;
    for (const auto& neg : list.candidates()) {
      if (neg.relevant) continue;
      ++pairs;
      if (pos.score > neg.score) {
        wins += 1.0;
      } else if (pos.score == neg.score) {
        wins += 0.5;
      }
    }
  }
  return pairs == 0 ? 0.0 : wins / static_cast<double>(pairs);
}

namespace {

template <typename Metric, typename Eligible>
MetricValue mean_over(std::span<const RankedList> lists, Metric metric, Eligible eligible) {
  MetricValue out;
  double total = 0.0;
  for (const auto& list : lists) {
    if (!eligible(list)) {
      ++out.skipped;
      continue;
    }
    total += metric(list);
    ++out.evaluated;
  }
  out.value = out.evaluated == 0 ? 0.0 : total / static_cast<double>(out.evaluated);
  return out;
}

bool has_relevant(const RankedList& l) { return l.num_relevant() > 0; }
bool has_both(const RankedList& l) { return l.num_relevant() > 0 && l.num_irrelevant() > 0; }

}  // namespace

MetricValue mean_average_precision(std::span<const RankedList> lists) {
  return mean_over(lists, average_precision, has_relevant);
}

MetricValue mean_reciprocal_rank(std::span<const RankedList> lists) {
  return mean_over(lists, reciprocal_rank, has_relevant);
}

MetricValue mean_precision_at_1(std::span<const RankedList> lists) {
  return mean_over(lists, precision_at_1, has_relevant);
}

MetricValue mean_auc(std::span<const RankedList> lists) {
  return mean_over(lists, static_cast<double (*)(const RankedList&)>(auc), has_both);
}

RankingReport evaluate_rankings(std::span<const RankedList> lists) {
  return {mean_auc(lists), mean_average_precision(lists), mean_reciprocal_rank(lists),
          mean_precision_at_1(lists)};
}

SparsityStats sparsity_stats(std::span<const TransportPlan> plans, std::optional<double> lambda) {
  SparsityStats out;
  out.plans = plans.size();
  if (plans.empty()) return out;
  for (const auto& p : plans) {
    const double count = static_cast<double>(active_alignments(p, lambda).size());
    out.mean_active_count += count;
    out.mean_active_percent += count / static_cast<double>(p.rows() * p.cols());
  }
  out.mean_active_count /= static_cast<double>(plans.size());
  out.mean_active_percent /= static_cast<double>(plans.size());
  return out;
}

}  // namespace sparse_align
