#pragma once

#include <cstddef>
#include <functional>

namespace sparse_align::cli {

// Worker count: hardware concurrency, capped by SPARSE_ALIGN_THREADS when set.
// Throws InputError if the variable is not a positive integer.
std::size_t worker_count();

// Calls fn(i) for i in [0, count) on up to `workers` threads. Results must be
// written to per-index slots; the first exception thrown is rethrown here.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace sparse_align::cli
