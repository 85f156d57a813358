#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparse_align/serialization.hpp"

namespace sparse_align::cli {

struct CheckResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t passes = 0;
  // Largest deviation seen: |cost - oracle| for cost checks, the optimality
  // gap for the perturbation check, count - bound for sparsity checks.
  double worst_gap = 0.0;
  std::size_t allowed_failures = 0;

  bool passed() const { return trials - passes <= allowed_failures; }
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 1000;
  std::size_t max_size = 6;  // largest N for the enumeration checks
  std::size_t workers = 1;
};

// Randomized invariant suite over the exact oracles. Each trial draws from
// its own generator seeded by (seed, check, trial), so the report does not
// depend on the worker count.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

json to_json(const CheckResult& check);

}  // namespace sparse_align::cli
