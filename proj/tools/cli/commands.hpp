#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/heatmap.hpp"
#include "cli/pipeline.hpp"
#include "cli/verify.hpp"
#include "sparse_align/serialization.hpp"

namespace sparse_align::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitSolver = 2,
  kExitVerification = 3,
};

struct AlignOptions {
  std::filesystem::path doc_x;
  std::filesystem::path doc_y;
  std::filesystem::path embeddings;
  AlignSettings settings;
};

struct RankOptions {
  std::filesystem::path manifest;
  std::filesystem::path embeddings;
  AlignSettings settings;
  std::size_t workers = 1;
};

struct RationaleOptions {
  std::filesystem::path alignment;
  std::filesystem::path gold;
  std::optional<double> delta;
  std::vector<double> delta_grid;  // empty means the default grid
};

struct SynthOptions {
  std::size_t rows = 30;
  std::size_t cols = 20;
  std::size_t k = 4;
  std::uint64_t seed = 0;
  SolverConfig solver;
};

// Report builders behind the subcommands. They throw the library's error
// types; run_cli maps those to exit codes.
json run_align(const AlignOptions& options);
json run_rank(const RankOptions& options);
json run_rationale(const RationaleOptions& options);
json run_synth(const SynthOptions& options);
json run_verify(const VerifyOptions& options);

// Full command line: parses argv, runs the subcommand, writes the JSON
// report to --out or `out`, diagnostics to `err`. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sparse_align::cli
