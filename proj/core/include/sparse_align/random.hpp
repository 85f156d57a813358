#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "sparse_align/matrix.hpp"

namespace sparse_align {

// Seedable generator with platform-independent output.
//
// Bits come from std::mt19937_64 (MT19937-64), whose sequence is fixed by the
// C++ standard. The standard distributions are implementation-defined, so the
// conversions to doubles and bounded integers are done here by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

// rows x cols matrix with iid U[lo, hi) entries.
Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);

}  // namespace sparse_align
