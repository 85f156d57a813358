#include "sparse_align/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sparse_align/errors.hpp"

namespace sparse_align {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kCheckEvery = 10;

// log(sum_j exp(x_j)) with x_j = (pot_j - cost_j) * inv_eps.
double log_sum_exp(std::span<const double> pot, std::span<const double> cost, double inv_eps) {
  double peak = kNegInf;
  for (std::size_t j = 0; j < pot.size(); ++j) peak = std::max(peak, (pot[j] - cost[j]) * inv_eps);
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t j = 0; j < pot.size(); ++j) acc += std::exp((pot[j] - cost[j]) * inv_eps - peak);
  return peak + std::log(acc);
}

std::vector<double> logs_of(std::span<const double> w) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
  return out;
}

Matrix gibbs_plan(const Matrix& cost, std::span<const double> f, std::span<const double> g,
                  double eps) {
  Matrix p(cost.rows(), cost.cols());
  const double inv_eps = 1.0 / eps;
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      const double e = (f[i] + g[j] - cost(i, j)) * inv_eps;
      p(i, j) = e == kNegInf ? 0.0 : std::exp(e);
    }
  }
  return p;
}

double marginal_violation(const Matrix& p, std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  const auto rs = p.row_sums();
  const auto cs = p.col_sums();
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(rs[i] - a[i]));
  for (std::size_t j = 0; j < b.size(); ++j) worst = std::max(worst, std::abs(cs[j] - b[j]));
  return worst;
}

// Projection onto U(a, b): scale down overfull rows, then overfull columns,
// then spread the remaining deficit as a rank-one correction. Changes the
// plan by at most a constant times the marginal violation.
Matrix project_onto_marginals(Matrix p, std::span<const double> a, std::span<const double> b) {
  const auto rs = p.row_sums();
  for (std::size_t i = 0; i < p.rows(); ++i) {
    if (rs[i] > a[i]) {
      const double s = a[i] / rs[i];
      for (double& x : p.row(i)) x *= s;
    }
  }
  const auto cs = p.col_sums();
  for (std::size_t j = 0; j < p.cols(); ++j) {
    if (cs[j] > b[j]) {
      const double s = b[j] / cs[j];
      for (std::size_t i = 0; i < p.rows(); ++i) p(i, j) *= s;
    }
  }
  const auto rs2 = p.row_sums();
  const auto cs2 = p.col_sums();
  std::vector<double> err_r(p.rows()), err_c(p.cols());
  double err_c_total = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) err_r[i] = std::max(0.0, a[i] - rs2[i]);
  for (std::size_t j = 0; j < p.cols(); ++j) {
    err_c[j] = std::max(0.0, b[j] - cs2[j]);
    err_c_total += err_c[j];
  }
  if (err_c_total > 0.0) {
    for (std::size_t i = 0; i < p.rows(); ++i)
      for (std::size_t j = 0; j < p.cols(); ++j) p(i, j) += err_r[i] * err_c[j] / err_c_total;
  }
  return p;
}

struct StageOutcome {
  std::size_t iterations = 0;
  double violation = 0.0;
  bool converged = false;
};

StageOutcome run_log_stage(const Matrix& cost, const Matrix& cost_t, std::span<const double> log_a,
                           std::span<const double> log_b, std::span<const double> a,
                           std::span<const double> b, std::vector<double>& f,
                           std::vector<double>& g, double eps, const SolverConfig& cfg) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  const double inv_eps = 1.0 / eps;
  StageOutcome out;
  for (std::size_t it = 1; it <= cfg.max_iterations_per_epsilon; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = log_a[i] == kNegInf ? kNegInf : eps * (log_a[i] - log_sum_exp(g, cost.row(i), inv_eps));
    }
    for (std::size_t j = 0; j < m; ++j) {
      g[j] = log_b[j] == kNegInf ? kNegInf : eps * (log_b[j] - log_sum_exp(f, cost_t.row(j), inv_eps));
    }
    out.iterations = it;
    if (it % kCheckEvery == 0 || it == cfg.max_iterations_per_epsilon) {
      out.violation = marginal_violation(gibbs_plan(cost, f, g, eps), a, b);
      if (out.violation < cfg.convergence_tol) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

// Plain u <- a / Kv, v <- b / K^T u. Stops early, keeping the last finite
// potentials, if the kernel underflows.
StageOutcome run_linear_stage(const Matrix& cost, std::span<const double> a,
                              std::span<const double> b, std::vector<double>& f,
                              std::vector<double>& g, double eps, const SolverConfig& cfg) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  Matrix kernel(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) kernel(i, j) = std::exp(-cost(i, j) / eps);
  std::vector<double> u(n), v(m);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::exp(f[i] / eps);
  for (std::size_t j = 0; j < m; ++j) v[j] = std::exp(g[j] / eps);

  auto finite_positive = [](const std::vector<double>& x) {
    return std::all_of(x.begin(), x.end(), [](double y) { return std::isfinite(y) && y > 0.0; });
  };
  auto store = [&] {
    for (std::size_t i = 0; i < n; ++i) f[i] = eps * std::log(u[i]);
    for (std::size_t j = 0; j < m; ++j) g[j] = eps * std::log(v[j]);
  };

  StageOutcome out;
  std::vector<double> next_u(n), next_v(m);
  for (std::size_t it = 1; it <= cfg.max_iterations_per_epsilon; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double kv = 0.0;
      for (std::size_t j = 0; j < m; ++j) kv += kernel(i, j) * v[j];
      next_u[i] = a[i] / kv;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double ktu = 0.0;
      for (std::size_t i = 0; i < n; ++i) ktu += kernel(i, j) * next_u[i];
      next_v[j] = b[j] / ktu;
    }
    if (!finite_positive(next_u) || !finite_positive(next_v)) {
      out.violation = std::numeric_limits<double>::infinity();
      return out;
    }
    u = next_u;
    v = next_v;
    store();
    out.iterations = it;
    if (it % kCheckEvery == 0 || it == cfg.max_iterations_per_epsilon) {
      out.violation = marginal_violation(gibbs_plan(cost, f, g, eps), a, b);
      if (out.violation < cfg.convergence_tol) {
        out.converged = true;
        break;
      }
    }
  }
  return out;
}

SinkhornResult run_schedule(const CostMatrix& c, const Marginals& a, const Marginals& b,
                            const std::vector<double>& schedule, const SolverConfig& cfg) {
  if (c.rows() != a.size() || c.cols() != b.size()) {
    throw ShapeError("sinkhorn: cost is " + std::to_string(c.rows()) + "x" +
                     std::to_string(c.cols()) + " but marginals have lengths " +
                     std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  const Matrix& cost = c.values();
  const Matrix cost_t = cost.transposed();
  const auto log_a = logs_of(a.weights());
  const auto log_b = logs_of(b.weights());

  SinkhornState state;
  state.potential_f.assign(c.rows(), 0.0);
  state.potential_g.assign(c.cols(), 0.0);
  if (!cfg.log_domain) {
    // Linear mode cannot represent u_i = 0; zero-mass rows are handled by the
    // log-domain path only.
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] == 0.0) throw InputError("linear-domain sinkhorn requires strictly positive marginals");
    for (std::size_t j = 0; j < b.size(); ++j)
      if (b[j] == 0.0) throw InputError("linear-domain sinkhorn requires strictly positive marginals");
  }

  StageOutcome last;
  for (double eps : schedule) {
    last = cfg.log_domain
               ? run_log_stage(cost, cost_t, log_a, log_b, a.weights(), b.weights(),
                               state.potential_f, state.potential_g, eps, cfg)
               : run_linear_stage(cost, a.weights(), b.weights(), state.potential_f,
                                  state.potential_g, eps, cfg);
    state.iterations_used += last.iterations;
    state.epsilon_current = eps;
    ++state.stages;
  }
  state.converged = last.converged;

  Matrix raw = gibbs_plan(cost, state.potential_f, state.potential_g, state.epsilon_current);
  state.max_violation = marginal_violation(raw, a.weights(), b.weights());
  Matrix projected = project_onto_marginals(std::move(raw), a.weights(), b.weights());
  std::vector<double> row(a.weights().begin(), a.weights().end());
  std::vector<double> col(b.weights().begin(), b.weights().end());
  return {TransportPlan(std::move(projected), std::move(row), std::move(col)), std::move(state)};
}

}  // namespace

std::vector<double> SinkhornState::u() const {
  std::vector<double> out(potential_f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(potential_f[i] / epsilon_current);
  return out;
}

std::vector<double> SinkhornState::v() const {
  std::vector<double> out(potential_g.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::exp(potential_g[j] / epsilon_current);
  return out;
}

std::vector<double> epsilon_schedule(const SolverConfig& cfg) {
  cfg.validate();
  std::vector<double> out;
  double eps = cfg.epsilon_start;
  while (eps > cfg.epsilon_final) {
    out.push_back(eps);
    eps *= cfg.scaling_factor;
  }
  out.push_back(cfg.epsilon_final);
  return out;
}

SinkhornResult sinkhorn_solve(const CostMatrix& c, const Marginals& a, const Marginals& b,
                              const SolverConfig& cfg) {
  cfg.validate();
  return run_schedule(c, a, b, {cfg.epsilon_final}, cfg);
}

SinkhornResult sinkhorn_epsilon_scaled(const CostMatrix& c, const Marginals& a,
                                       const Marginals& b, const SolverConfig& cfg) {
  return run_schedule(c, a, b, epsilon_schedule(cfg), cfg);
}

}  // namespace sparse_align
