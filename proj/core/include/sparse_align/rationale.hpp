#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sparse_align/ot_core.hpp"

namespace sparse_align {

using BinaryVector = std::vector<std::uint8_t>;

// Per-side span selections. Also the shape of gold annotations.
struct RationalePair {
  BinaryVector r_x;
  BinaryVector r_y;

  bool operator==(const RationalePair&) const = default;
};

struct SoftRationales {
  std::vector<double> s_x;  // row sums of P
  std::vector<double> s_y;  // column sums of P
};

inline constexpr double kDefaultLossAlpha = 0.2;
inline constexpr double kProbabilityClip = 1e-7;

// r_x[i] = 1 iff some P_ij > delta; r_y[j] = 1 iff some P_ij > delta.
RationalePair binarize(const TransportPlan& p, double delta);

SoftRationales soft_rationales(const TransportPlan& p);

// F1 over positive positions. Both selections empty counts as perfect
// agreement (1.0); otherwise zero precision and recall give 0.0.
double token_f1(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gold);

// Mean of token_f1 over both sides of every (plan, gold) pair at one delta.
double mean_rationale_f1(std::span<const TransportPlan> plans,
                         std::span<const RationalePair> golds, double delta);

// Grid value with the highest mean_rationale_f1; ties go to the smaller delta.
double select_delta(std::span<const TransportPlan> plans, std::span<const RationalePair> golds,
                    std::span<const double> grid);

// 20 log-spaced points from 1e-4 / (n * m) to 1.
std::vector<double> default_delta_grid(std::size_t n, std::size_t m);

// Zeroes entries <= lambda and keeps the rest verbatim (no renormalization),
// so <C, masked> is a sub-sum of <C, P>.
TransportPlan sufficiency_mask(const TransportPlan& p, double lambda);

// max_i max(cost_pos - costs_neg[i] + margin, 0).
double hinge_contrastive_loss(double cost_pos, std::span<const double> costs_neg, double margin);

// alpha * task_loss + (1 - alpha) * rationale_loss, alpha in [0, 1].
double combined_loss(double task_loss, double rationale_loss, double alpha = kDefaultLossAlpha);

// Mean binary cross-entropy over all n + m positions. Soft values are
// clipped to [1e-7, 1 - 1e-7] first.
double rationale_cross_entropy(const SoftRationales& soft, std::span<const std::uint8_t> gold_x,
                               std::span<const std::uint8_t> gold_y);

}  // namespace sparse_align
