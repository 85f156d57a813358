#include "sparse_align/textio.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "sparse_align/errors.hpp"

namespace sparse_align {

namespace {

constexpr std::array<std::string_view, 34> kAbbreviations = {
    "mr",   "mrs",  "ms",   "dr",  "prof", "sr",  "jr",  "st",   "vs",  "etc", "e.g", "i.e",
    "u.s",  "u.k",  "u.n",  "inc", "ltd",  "co",  "corp", "no",  "fig", "al",  "approx",
    "dept", "est",  "gen",  "gov", "mt",   "sen", "rep", "jan",  "feb", "aug", "sept"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool starts_sentence(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '"' || c == '\'' || c == '(' ||
         c == '[' || c >= 0x80;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// The whitespace-delimited word ending at the period at `dot`, without the
// period and without leading quotes or brackets.
bool ends_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !is_space(text[start - 1])) --start;
  while (start < dot && (text[start] == '"' || text[start] == '\'' || text[start] == '(' || text[start] == '[')) ++start;
  const std::string_view word = text.substr(start, dot - start);
  if (word.empty()) return false;
  if (word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]))) return true;  // initials
  const std::string lower = lowercase(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

SpanSet split_sentences(std::string_view text, std::string source_id) {
  if (trim(text).empty()) throw InputError("cannot split empty or blank text into sentences");
  SpanSet out{{}, std::move(source_id)};
  auto emit = [&](std::size_t from, std::size_t to) {
    const auto span = trim(text.substr(from, to - from));
    if (!span.empty()) out.spans.emplace_back(span);
  };

  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    const std::size_t first_mark = i;
    std::size_t end = i + 1;
    while (end < text.size() && (is_terminator(text[end]) || is_closer(text[end]))) ++end;
    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;
    const bool boundary = next > end && next < text.size() &&
                          starts_sentence(static_cast<unsigned char>(text[next]));
    const bool abbreviation = text[first_mark] == '.' && end == first_mark + 1 &&
                              ends_abbreviation(text, first_mark);
    if (boundary && !abbreviation) {
      emit(begin, end);
      begin = next;
    }
    i = end;
  }
  emit(begin, text.size());
  return out;
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

bool EmbeddingTable::insert(std::string token, std::vector<double> vec) {
  if (vec.size() != dimension_) {
    throw FormatError("embedding for '" + token + "' has " + std::to_string(vec.size()) +
                      " values, expected " + std::to_string(dimension_));
  }
  return entries_.try_emplace(std::move(token), std::move(vec)).second;
}

EmbeddingTable parse_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dimension = 0;
  bool header_seen = false;
  std::vector<std::pair<std::string, std::vector<double>>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = fields_of(line);
    if (fields.empty()) continue;
    if (!header_seen && rows.empty() && fields.size() == 2) {
      std::size_t count = 0, dim = 0;
      if (parse_number(fields[0], count) && parse_number(fields[1], dim)) {
        if (dim == 0) throw ParseError("line " + std::to_string(line_no) + ": header dimension is 0");
        header_seen = true;
        dimension = dim;
        continue;
      }
    }
    if (fields.size() < 2) {
      throw FormatError("line " + std::to_string(line_no) + ": token '" + std::string(fields[0]) +
                        "' has no vector values");
    }
    if (dimension == 0) dimension = fields.size() - 1;
    if (fields.size() - 1 != dimension) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dimension) + " values, got " +
                        std::to_string(fields.size() - 1));
    }
    std::vector<double> vec(dimension);
    for (std::size_t d = 0; d < dimension; ++d) {
      if (!parse_number(fields[d + 1], vec[d]) || !std::isfinite(vec[d])) {
        throw ParseError("line " + std::to_string(line_no) + ": '" + std::string(fields[d + 1]) +
                         "' is not a finite number");
      }
    }
    rows.emplace_back(std::string(fields[0]), std::move(vec));
  }
  if (dimension == 0) throw ParseError("embedding file contains no vectors");

  EmbeddingTable table(dimension);
  for (auto& [token, vec] : rows) table.insert(std::move(token), std::move(vec));
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file " + path.string());
  return parse_embeddings(in);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

SpanEmbedding embed_span(std::string_view span, const EmbeddingTable& table) {
  if (table.empty()) throw InputError("embed_span: embedding table is empty");
  SpanEmbedding out{std::vector<double>(table.dimension(), 0.0)};
  for (const auto& token : tokenize(span)) {
    const auto* vec = table.find(token);
    if (vec == nullptr) continue;
    for (std::size_t d = 0; d < vec->size(); ++d) out.vector[d] += (*vec)[d];
    ++out.known_tokens;
  }
  if (out.known_tokens == 0) {
    out.all_oov = true;
    return out;
  }
  for (double& x : out.vector) x /= static_cast<double>(out.known_tokens);
  return out;
}

std::string to_string(CostMetric metric) {
  switch (metric) {
    case CostMetric::CosineDistance: return "cosine_distance";
    case CostMetric::NegativeCosine: return "negative_cosine";
    case CostMetric::Euclidean: return "euclidean";
    case CostMetric::DotNegative: return "dot_negative";
  }
  return "unknown";
}

CostMetric parse_metric(std::string_view name) {
  if (name == "cosine_distance") return CostMetric::CosineDistance;
  if (name == "negative_cosine") return CostMetric::NegativeCosine;
  if (name == "euclidean") return CostMetric::Euclidean;
  if (name == "dot_negative") return CostMetric::DotNegative;
  throw InputError("unknown cost metric '" + std::string(name) + "'");
}

double cosine_similarity(std::span<const double> x, std::span<const double> y) {
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t d = 0; d < x.size(); ++d) {
    dot += x[d] * y[d];
    nx += x[d] * x[d];
    ny += y[d] * y[d];
  }
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(nx) * std::sqrt(ny)), -1.0, 1.0);
}

CostMatrix cost_matrix(const std::vector<std::vector<double>>& xs,
                       const std::vector<std::vector<double>>& ys, CostMetric metric) {
  if (xs.empty() || ys.empty()) throw InputError("cost_matrix needs at least one vector per side");
  const std::size_t dim = xs.front().size();
  const auto check = [dim](const std::vector<double>& v) {
    if (v.size() != dim) {
      throw ShapeError("cost_matrix: vector of dimension " + std::to_string(v.size()) +
                       " among vectors of dimension " + std::to_string(dim));
    }
  };
  std::for_each(xs.begin(), xs.end(), check);
  std::for_each(ys.begin(), ys.end(), check);

  Matrix out(xs.size(), ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const auto& x = xs[i];
      const auto& y = ys[j];
      switch (metric) {
        case CostMetric::CosineDistance:
          out(i, j) = 1.0 - cosine_similarity(x, y);
          break;
        case CostMetric::NegativeCosine:
          out(i, j) = -cosine_similarity(x, y);
          break;
        case CostMetric::Euclidean: {
          double acc = 0.0;
          for (std::size_t d = 0; d < dim; ++d) acc += (x[d] - y[d]) * (x[d] - y[d]);
          out(i, j) = std::sqrt(acc);
          break;
        }
        case CostMetric::DotNegative: {
          double acc = 0.0;
          for (std::size_t d = 0; d < dim; ++d) acc += x[d] * y[d];
          out(i, j) = -acc;
          break;
        }
      }
    }
  }
  return CostMatrix(std::move(out));
}

}  // namespace sparse_align
