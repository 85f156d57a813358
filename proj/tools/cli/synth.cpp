#include "cli/synth.hpp"

#include <algorithm>

#include "sparse_align/errors.hpp"
#include "sparse_align/random.hpp"

namespace sparse_align::cli {

CostMatrix synthetic_costs(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  if (rows == 0 || cols == 0) throw InputError("synthetic matrix needs at least one row and column");
  Rng rng(seed);
  const std::size_t band_begin = rows / 4;
  const std::size_t band_end = std::min(rows, band_begin + std::max<std::size_t>(1, rows / 2));
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const bool banded = i >= band_begin && i < band_end;
    const std::size_t band_col = i * cols / rows;
    for (std::size_t j = 0; j < cols; ++j) {
      const double u = rng.uniform();
      m(i, j) = banded && j == band_col ? 0.01 + 0.09 * u : 0.3 + 0.7 * u;
    }
  }
  return CostMatrix(std::move(m));
}

std::vector<SynthVariant> solve_synthetic(const CostMatrix& c, std::size_t k, const SolverConfig& solver) {
  const std::size_t lo = std::min(c.rows(), c.cols());
  const std::size_t hi = std::max(c.rows(), c.cols());
  const std::size_t k_ratio = std::clamp<std::size_t>(k, 1, hi / lo);

  std::vector<SynthVariant> out;
  const std::pair<ConstraintSpec, double> runs[] = {
      {{Variant::Vanilla, 1}, 0.0},
      {{Variant::OneToK, k_ratio}, 0.0},
      {{Variant::RelaxedOneToK, k_ratio}, -kRelaxedOffset},
      {{Variant::ExactK, k}, 0.0},
  };
  for (const auto& [spec, offset] : runs) {
    SynthVariant v{spec, std::nullopt, {}};
    try {
      v.alignment = solve_constrained(offset == 0.0 ? c : c.shifted(offset), spec, solver);
    } catch (const Error& e) {
      v.error = e.what();
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace sparse_align::cli
