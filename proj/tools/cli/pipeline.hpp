#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparse_align/constraints.hpp"
#include "sparse_align/textio.hpp"

namespace sparse_align::cli {

struct Document {
  std::string path;
  SpanSet spans;
  std::vector<std::vector<double>> vectors;  // one mean embedding per span
  std::vector<std::size_t> oov_spans;        // spans with no known token
};

// Throws InputError if the file cannot be read or holds no text.
std::string read_text_file(const std::filesystem::path& path);

Document load_document(const std::filesystem::path& path, const EmbeddingTable& table);

struct AlignSettings {
  ConstraintSpec spec;
  SolverConfig solver;
  std::optional<CostMetric> metric;  // defaults by variant
  std::optional<double> lambda;
};

// negative_cosine for relaxed one-to-k (it needs costs of both signs),
// cosine_distance for everything else.
CostMetric default_metric(Variant variant);

// Side length of the square augmented problem, 0 for vanilla.
std::size_t augmented_size(std::size_t n, std::size_t m, const ConstraintSpec& spec);

struct DocumentAlignment {
  CostMatrix cost;  // as produced by the metric, before any shift
  CostMetric metric;
  ConstrainedAlignment alignment;
  double cost_shift = 0.0;  // added to every cost before solving
  double similarity = 0.0;  // -<C, P> on the unshifted costs
  std::vector<std::string> warnings;
};

// Builds the cost matrix between the two documents' spans and solves the
// constrained problem. exact_k needs strictly positive costs, so a cost
// matrix with min <= 0 is shifted to min 0.1 first; exact_k always selects
// exactly k pairs, so a constant shift leaves the optimal support unchanged.
// original_cost and similarity are reported on the unshifted costs.
DocumentAlignment align_documents(const Document& x, const Document& y, const AlignSettings& settings);

// Same as align_documents for a precomputed cost matrix.
DocumentAlignment align_costs(const CostMatrix& c, CostMetric metric, const AlignSettings& settings);

}  // namespace sparse_align::cli
