#include "sparse_align/rationale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparse_align/errors.hpp"

namespace sparse_align {

RationalePair binarize(const TransportPlan& p, double delta) {
  if (delta < 0.0) throw InputError("binarize: delta must be >= 0");
  RationalePair out{BinaryVector(p.rows(), 0), BinaryVector(p.cols(), 0)};
  for (std::size_t i = 0; i < p.rows(); ++i)
    for (std::size_t j = 0; j < p.cols(); ++j)
      if (p(i, j) > delta) out.r_x[i] = out.r_y[j] = 1;
  return out;
}

SoftRationales soft_rationales(const TransportPlan& p) {
  return {p.values().row_sums(), p.values().col_sums()};
}

double token_f1(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gold) {
  if (pred.size() != gold.size()) {
    throw ShapeError("token_f1: prediction has " + std::to_string(pred.size()) +
                     " positions, gold has " + std::to_string(gold.size()));
  }
  std::size_t tp = 0, pred_pos = 0, gold_pos = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0;
    const bool g = gold[i] != 0;
    pred_pos += p;
    gold_pos += g;
    tp += p && g;
  }
  if (pred_pos == 0 && gold_pos == 0) return 1.0;
  if (tp == 0) return 0.0;
  // 2PR / (P + R) simplifies to 2tp / (|pred| + |gold|).
  return 2.0 * static_cast<double>(tp) / static_cast<double>(pred_pos + gold_pos);
}

double mean_rationale_f1(std::span<const TransportPlan> plans,
                         std::span<const RationalePair> golds, double delta) {
  if (plans.empty() || plans.size() != golds.size()) {
    throw InputError("need one gold rationale per plan and at least one plan");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < plans.size(); ++t) {
    const auto pred = binarize(plans[t], delta);
    total += token_f1(pred.r_x, golds[t].r_x) + token_f1(pred.r_y, golds[t].r_y);
  }
  return total / (2.0 * static_cast<double>(plans.size()));
}

double select_delta(std::span<const TransportPlan> plans, std::span<const RationalePair> golds,
                    std::span<const double> grid) {
  if (grid.empty()) throw InputError("select_delta: empty delta grid");
  double best_delta = grid.front();
  double best_f1 = -1.0;
  for (double delta : grid) {
    const double f1 = mean_rationale_f1(plans, golds, delta);
    if (f1 > best_f1 || (f1 == best_f1 && delta < best_delta)) {
      best_f1 = f1;
      best_delta = delta;
    }
  }
  return best_delta;
}

std::vector<double> default_delta_grid(std::size_t n, std::size_t m) {
  constexpr std::size_t kPoints = 20;
  const double lo = std::log(1e-4 / (static_cast<double>(n) * static_cast<double>(m)));
  const double hi = 0.0;
  std::vector<double> grid(kPoints);
  for (std::size_t t = 0; t < kPoints; ++t) {
    grid[t] = std::exp(lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(kPoints - 1));
  }
  grid.back() = 1.0;
  return grid;
}

TransportPlan sufficiency_mask(const TransportPlan& p, double lambda) {
  if (lambda < 0.0) throw InputError("sufficiency_mask: lambda must be >= 0");
  Matrix masked = p.values();
  for (double& x : masked.values())
    if (x <= lambda) x = 0.0;
  return TransportPlan(std::move(masked));
}

double hinge_contrastive_loss(double cost_pos, std::span<const double> costs_neg, double margin) {
  if (costs_neg.empty()) throw InputError("hinge_contrastive_loss: no negative costs");
  if (margin < 0.0) throw InputError("hinge_contrastive_loss: margin must be >= 0");
  double worst = 0.0;
  for (double neg : costs_neg) worst = std::max(worst, cost_pos - neg + margin);
  return worst;
}

double combined_loss(double task_loss, double rationale_loss, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("combined_loss: alpha must lie in [0, 1]");
  if (alpha == 1.0) return task_loss;
  if (alpha == 0.0) return rationale_loss;
  return alpha * task_loss + (1.0 - alpha) * rationale_loss;
}

double rationale_cross_entropy(const SoftRationales& soft, std::span<const std::uint8_t> gold_x,
                               std::span<const std::uint8_t> gold_y) {
  if (soft.s_x.size() != gold_x.size() || soft.s_y.size() != gold_y.size()) {
    throw ShapeError("rationale_cross_entropy: soft and gold lengths differ");
  }
  const auto bce = [](double q, std::uint8_t g) {
    q = std::clamp(q, kProbabilityClip, 1.0 - kProbabilityClip);
    return g != 0 ? -std::log(q) : -std::log1p(-q);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < gold_x.size(); ++i) total += bce(soft.s_x[i], gold_x[i]);
  for (std::size_t j = 0; j < gold_y.size(); ++j) total += bce(soft.s_y[j], gold_y[j]);
  const std::size_t count = gold_x.size() + gold_y.size();
  return count == 0 ? 0.0 : total / static_cast<double>(count);
}

}  // namespace sparse_align
