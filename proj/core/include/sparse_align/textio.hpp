#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sparse_align/ot_core.hpp"

namespace sparse_align {

struct SpanSet {
  std::vector<std::string> spans;
  std::string source_id;
};

// Rule-based splitter: a sentence ends at '.', '!' or '?' (plus any closing
// quotes or brackets) when followed by whitespace and then an uppercase
// letter, a quote, a digit or a non-ASCII character. Periods that end a
// known abbreviation ("Mr.", "e.g.", "U.S.", ...) never split. Text without a
// terminator is one span. Throws InputError on empty or blank text.
SpanSet split_sentences(std::string_view text, std::string source_id = {});

// Immutable after loading; safe to share across threads.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Returns nullptr for out-of-vocabulary tokens.
  const std::vector<double>* find(const std::string& token) const;
  // Keeps the first vector for a repeated token; returns false on a repeat.
  // Throws FormatError when the length is not dimension().
  bool insert(std::string token, std::vector<double> vec);

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

// Text vector format: optional "count dim" header, then "token v1 ... vd"
// per line. Without a header the dimension comes from the first row.
// Non-numeric fields raise ParseError, wrong field counts FormatError; both
// name the line.
EmbeddingTable parse_embeddings(std::istream& in);
EmbeddingTable load_embeddings(const std::filesystem::path& path);

// Lowercased runs of letters, digits and non-ASCII bytes; everything else
// separates tokens and is dropped.
std::vector<std::string> tokenize(std::string_view text);

struct SpanEmbedding {
  std::vector<double> vector;
  std::size_t known_tokens = 0;
  bool all_oov = false;
};

// Mean of the in-vocabulary token vectors; zero vector with all_oov set when
// nothing is known. Throws InputError on an empty table.
SpanEmbedding embed_span(std::string_view span, const EmbeddingTable& table);

enum class CostMetric { CosineDistance, NegativeCosine, Euclidean, DotNegative };

std::string to_string(CostMetric metric);
// "cosine_distance", "negative_cosine", "euclidean", "dot_negative".
CostMetric parse_metric(std::string_view name);

// Cosine similarity with a zero vector is defined as 0.
double cosine_similarity(std::span<const double> x, std::span<const double> y);

// cosine_distance 1 - cos, negative_cosine -cos, euclidean ||x - y||,
// dot_negative -<x, y>. Throws ShapeError on mixed dimensions.
CostMatrix cost_matrix(const std::vector<std::vector<double>>& xs,
                       const std::vector<std::vector<double>>& ys, CostMetric metric);

}  // namespace sparse_align
