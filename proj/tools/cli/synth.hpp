#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparse_align/constraints.hpp"

namespace sparse_align::cli {

// Seeded rows x cols cost matrix drawn from Rng(seed), row-major:
//   background  0.3 + 0.7 u                     in [0.3, 1.0)
//   band        0.01 + 0.09 u                   in [0.01, 0.1)
// The band covers rows [rows/4, rows/4 + max(1, rows/2)) at column
// floor(i * cols / rows). Every cell draws exactly one u, band or not.
CostMatrix synthetic_costs(std::size_t rows, std::size_t cols, std::uint64_t seed);

// The relaxed variant needs costs of both signs; it runs on C - 0.2, which
// makes the band negative and the background positive.
inline constexpr double kRelaxedOffset = 0.2;

struct SynthVariant {
  ConstraintSpec spec;
  std::optional<ConstrainedAlignment> alignment;
  std::string error;  // set when the variant could not be solved
};

// Solves vanilla, one_to_k, relaxed_one_to_k and exact_k on the synthetic
// matrix. one_to_k and relaxed use k clamped to [1, max(r, c) / min(r, c)];
// exact_k uses k as given.
std::vector<SynthVariant> solve_synthetic(const CostMatrix& c, std::size_t k, const SolverConfig& solver);

}  // namespace sparse_align::cli
