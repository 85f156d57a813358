#include "cli/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "sparse_align/errors.hpp"
#include "sparse_align/metrics.hpp"

namespace sparse_align::cli {

namespace {

constexpr double kExactKMinCost = 0.1;

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Document load_document(const std::filesystem::path& path, const EmbeddingTable& table) {
  Document doc;
  doc.path = path.string();
  try {
    doc.spans = split_sentences(read_text_file(path), doc.path);
  } catch (const InputError& e) {
    throw InputError(doc.path + ": " + e.what());
  }
  for (std::size_t s = 0; s < doc.spans.spans.size(); ++s) {
    auto emb = embed_span(doc.spans.spans[s], table);
    if (emb.all_oov) doc.oov_spans.push_back(s);
    doc.vectors.push_back(std::move(emb.vector));
  }
  return doc;
}

CostMetric default_metric(Variant variant) {
  return variant == Variant::RelaxedOneToK ? CostMetric::NegativeCosine : CostMetric::CosineDistance;
}

std::size_t augmented_size(std::size_t n, std::size_t m, const ConstraintSpec& spec) {
  if (n > m) std::swap(n, m);
  switch (spec.variant) {
    case Variant::Vanilla: return 0;
    case Variant::OneToK: return m;
    case Variant::RelaxedOneToK: return m + spec.k * n;
    case Variant::ExactK: return n + m - spec.k;
  }
  return 0;
}

DocumentAlignment align_costs(const CostMatrix& c, CostMetric metric, const AlignSettings& settings) {
  std::vector<std::string> warnings;
  double shift = 0.0;
  CostMatrix solve_on = c;
  if (settings.spec.variant == Variant::ExactK && c.min() <= 0.0) {
    shift = kExactKMinCost - c.min();
    solve_on = c.shifted(shift);
    warnings.push_back("exact_k needs positive costs; shifted all costs by " + std::to_string(shift));
  }
  auto alignment = solve_constrained(solve_on, settings.spec, settings.solver, settings.lambda);
  if (!alignment.solver_converged)
    warnings.push_back("sinkhorn did not reach the convergence tolerance; plan was projected");

  double original = 0.0;
  for (const auto& pair : alignment.active_pairs) original += c(pair.row, pair.col) * pair.mass;
  alignment.original_cost = original;
  const double similarity = score_pair(c, alignment.plan);
  return DocumentAlignment{c, metric, std::move(alignment), shift, similarity, std::move(warnings)};
}

DocumentAlignment align_documents(const Document& x, const Document& y, const AlignSettings& settings) {
  const CostMetric metric = settings.metric.value_or(default_metric(settings.spec.variant));
  auto out = align_costs(cost_matrix(x.vectors, y.vectors, metric), metric, settings);
  for (const Document* doc : {&x, &y}) {
    if (!doc->oov_spans.empty()) {
      out.warnings.push_back(doc->path + ": " + std::to_string(doc->oov_spans.size()) + " of " +
                             std::to_string(doc->spans.spans.size()) +
                             " spans have no known tokens and embed to the zero vector");
    }
  }
  return out;
}

}  // namespace sparse_align::cli
