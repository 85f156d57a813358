#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparse_align/ot_core.hpp"

namespace sparse_align {

struct Candidate {
  std::string id;
  double score = 0.0;
  bool relevant = false;
};

// Candidates for one query, held sorted by score descending with ties broken
// by candidate id ascending.
class RankedList {
 public:
  // Throws InputError when candidates is empty.
  RankedList(std::string query_id, std::vector<Candidate> candidates);

  const std::string& query_id() const { return query_id_; }
  const std::vector<Candidate>& candidates() const { return candidates_; }
  std::size_t num_relevant() const;
  std::size_t num_irrelevant() const { return candidates_.size() - num_relevant(); }

 private:
  std::string query_id_;
  std::vector<Candidate> candidates_;
};

// Similarity of two documents: -<C, P>, so higher is better.
double score_pair(const CostMatrix& c, const TransportPlan& p);

// Per-query values. Precondition: at least one relevant candidate (and one
// irrelevant for auc); the batch functions below skip queries that fail it.
double average_precision(const RankedList& list);
double reciprocal_rank(const RankedList& list);
double precision_at_1(const RankedList& list);
// Probability a relevant candidate outscores an irrelevant one, ties 0.5.
double auc(const RankedList& list);

struct MetricValue {
  double value = 0.0;         // mean over evaluated queries, 0 when none
  std::size_t evaluated = 0;
  std::size_t skipped = 0;    // queries lacking the candidates the metric needs
};

MetricValue mean_average_precision(std::span<const RankedList> lists);
MetricValue mean_reciprocal_rank(std::span<const RankedList> lists);
MetricValue mean_precision_at_1(std::span<const RankedList> lists);
MetricValue mean_auc(std::span<const RankedList> lists);

struct RankingReport {
  MetricValue auc;
  MetricValue map;
  MetricValue mrr;
  MetricValue p_at_1;
};

RankingReport evaluate_rankings(std::span<const RankedList> lists);

struct SparsityStats {
  double mean_active_count = 0.0;
  double mean_active_percent = 0.0;  // fraction in [0, 1], averaged per plan
  std::size_t plans = 0;
};

// lambda defaults to 0.01 / (n * m) for each plan's own shape.
SparsityStats sparsity_stats(std::span<const TransportPlan> plans,
                             std::optional<double> lambda = std::nullopt);

}  // namespace sparse_align
