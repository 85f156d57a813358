#include "sparse_align/ot_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparse_align/errors.hpp"

namespace sparse_align {

namespace {

void require_same_shape(const Matrix& x, const Matrix& y, const char* what) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError(std::string(what) + ": " + std::to_string(x.rows()) + "x" +
                     std::to_string(x.cols()) + " vs " + std::to_string(y.rows()) +
                     "x" + std::to_string(y.cols()));
  }
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  return worst;
}

}  // namespace

Marginals::Marginals(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("marginals must have at least one entry");
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) throw InputError("marginal weights must be finite and >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InputError("marginal weights sum to " + std::to_string(total) + ", expected 1");
  }
}

Marginals Marginals::uniform(std::size_t n) {
  if (n == 0) throw InputError("marginals must have at least one entry");
  return Marginals(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

CostMatrix::CostMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw InputError("cost matrix must be at least 1x1");
  }
  for (double v : values_.values()) {
    if (!std::isfinite(v)) throw InputError("cost matrix contains a non-finite entry");
  }
}

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  return CostMatrix(Matrix::from_rows(rows));
}

double CostMatrix::min() const {
  auto v = values_.values();
  return *std::min_element(v.begin(), v.end());
}

double CostMatrix::max() const {
  auto v = values_.values();
  return *std::max_element(v.begin(), v.end());
}

CostMatrix CostMatrix::scaled(double alpha) const {
  Matrix out = values_;
  for (double& v : out.values()) v *= alpha;
  return CostMatrix(std::move(out));
}

CostMatrix CostMatrix::shifted(double offset) const {
  Matrix out = values_;
  for (double& v : out.values()) v += offset;
  return CostMatrix(std::move(out));
}

TransportPlan::TransportPlan(Matrix values)
    : values_(std::move(values)),
      row_marginal_(values_.row_sums()),
      col_marginal_(values_.col_sums()) {
  for (double v : values_.values()) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("transport plan entries must be finite and >= 0");
  }
}

TransportPlan::TransportPlan(Matrix values, std::vector<double> row_marginal,
                             std::vector<double> col_marginal, double feasibility_tol)
    : values_(std::move(values)),
      row_marginal_(std::move(row_marginal)),
      col_marginal_(std::move(col_marginal)),
      feasibility_tol_(feasibility_tol) {
  if (row_marginal_.size() != values_.rows() || col_marginal_.size() != values_.cols()) {
    throw ShapeError("plan marginals do not match plan dimensions");
  }
  for (double v : values_.values()) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("transport plan entries must be finite and >= 0");
  }
  const double row_gap = max_abs_diff(values_.row_sums(), row_marginal_);
  const double col_gap = max_abs_diff(values_.col_sums(), col_marginal_);
  if (row_gap > feasibility_tol_ || col_gap > feasibility_tol_) {
    throw InputError("plan violates its marginals by " + std::to_string(std::max(row_gap, col_gap)));
  }
}

TransportPlan TransportPlan::transposed() const {
  TransportPlan t(values_.transposed());
  t.row_marginal_ = col_marginal_;
  t.col_marginal_ = row_marginal_;
  t.feasibility_tol_ = feasibility_tol_;
  return t;
}

void SolverConfig::validate() const {
  if (!(epsilon_final > 0.0)) throw InputError("epsilon_final must be > 0");
  if (!(epsilon_start >= epsilon_final)) throw InputError("epsilon_start must be >= epsilon_final");
  if (!(scaling_factor > 0.0 && scaling_factor < 1.0)) throw InputError("scaling_factor must lie in (0, 1)");
  if (max_iterations_per_epsilon == 0) throw InputError("max_iterations_per_epsilon must be >= 1");
  if (!(convergence_tol > 0.0)) throw InputError("convergence_tol must be > 0");
}

double transport_cost(const CostMatrix& c, const TransportPlan& p) {
  require_same_shape(c.values(), p.values(), "transport_cost");
  auto cv = c.values().values();
  auto pv = p.values().values();
  return std::inner_product(cv.begin(), cv.end(), pv.begin(), 0.0);
}

double entropy(const TransportPlan& p) {
  double h = 0.0;
  for (double x : p.values().values()) {
    if (x > 0.0) h -= x * (std::log(x) - 1.0);
  }
  return h;
}

ValidationReport validate_plan(const TransportPlan& p, const Marginals& a,
                               const Marginals& b, double tol) {
  if (p.rows() != a.size() || p.cols() != b.size()) {
    throw ShapeError("validate_plan: plan is " + std::to_string(p.rows()) + "x" +
                     std::to_string(p.cols()) + " but marginals have lengths " +
                     std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  ValidationReport report;
  report.max_row_violation = max_abs_diff(p.values().row_sums(), a.weights());
  report.max_col_violation = max_abs_diff(p.values().col_sums(), b.weights());
  auto v = p.values().values();
  report.min_entry = *std::min_element(v.begin(), v.end());
  report.passed = report.max_row_violation <= tol && report.max_col_violation <= tol &&
                  report.min_entry >= -tol;
  return report;
}

}  // namespace sparse_align
