#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sparse_align/matrix.hpp"

namespace sparse_align {

inline constexpr double kDefaultFeasibilityTol = 1e-6;

// Probability vector: nonnegative entries summing to one (within 1e-9).
class Marginals {
 public:
  // Throws InputError on negative/non-finite entries or a bad total.
  explicit Marginals(std::vector<double> weights);
  static Marginals uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

// n x m matrix of finite pairwise costs, n, m >= 1.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix values);
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }

  double min() const;
  double max() const;
  CostMatrix transposed() const { return CostMatrix(values_.transposed()); }
  CostMatrix scaled(double alpha) const;
  CostMatrix shifted(double offset) const;

 private:
  Matrix values_;
};

// Nonnegative n x m plan together with the marginals it is meant to carry.
//
// Plans produced by the solvers carry the target marginals a and b. Plans
// extracted from augmented problems carry their realized (possibly partial)
// row and column mass, which is why the marginals are plain vectors rather
// than Marginals.
class TransportPlan {
 public:
  // Marginals are taken to be the realized row/column sums.
  explicit TransportPlan(Matrix values);
  // Throws InputError if a row/column sum misses its marginal by more than tol.
  TransportPlan(Matrix values, std::vector<double> row_marginal,
                std::vector<double> col_marginal,
                double feasibility_tol = kDefaultFeasibilityTol);

  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& values() const { return values_; }
  std::span<const double> row_marginal() const { return row_marginal_; }
  std::span<const double> col_marginal() const { return col_marginal_; }
  double feasibility_tol() const { return feasibility_tol_; }
  double mass() const { return values_.sum(); }

  TransportPlan transposed() const;

 private:
  Matrix values_;
  std::vector<double> row_marginal_;
  std::vector<double> col_marginal_;
  double feasibility_tol_ = kDefaultFeasibilityTol;
};

struct SolverConfig {
  double epsilon_final = 1e-4;
  double epsilon_start = 1.0;
  double scaling_factor = 0.5;
  std::size_t max_iterations_per_epsilon = 500;
  double convergence_tol = 1e-6;
  bool log_domain = true;

  // Throws InputError when the schedule is inconsistent.
  void validate() const;
};

struct ValidationReport {
  double max_row_violation = 0.0;
  double max_col_violation = 0.0;
  double min_entry = 0.0;
  bool passed = false;
};

// <C, P> = sum_ij C_ij P_ij.
double transport_cost(const CostMatrix& c, const TransportPlan& p);

// -sum_ij P_ij (log P_ij - 1), with 0 log 0 = 0.
double entropy(const TransportPlan& p);

ValidationReport validate_plan(const TransportPlan& p, const Marginals& a,
                               const Marginals& b,
                               double tol = kDefaultFeasibilityTol);

}  // namespace sparse_align
