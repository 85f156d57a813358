#include "cli/heatmap.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "sparse_align/errors.hpp"

namespace sparse_align::cli {

namespace {

constexpr int kCell = 14;
constexpr int kMargin = 24;

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

HeatmapFormat parse_heatmap_format(const std::string& name) {
  if (name == "none") return HeatmapFormat::None;
  if (name == "text") return HeatmapFormat::Text;
  if (name == "svg") return HeatmapFormat::Svg;
  throw InputError("unknown heatmap format '" + name + "' (expected text, svg or none)");
}

std::string text_heatmap(const TransportPlan& p, double lambda) {
  std::ostringstream out;
  out << p.rows() << "x" << p.cols() << " plan, '#' active (> " << lambda << "), '+' inactive mass\n";
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const double v = p(i, j);
      out << (v > lambda ? '#' : v > 0.0 ? '+' : '.');
    }
    out << '\n';
  }
  return out.str();
}

std::string svg_heatmap(const TransportPlan& p, double lambda, const std::string& title) {
  const auto values = p.values().values();
  const double peak = std::max(*std::max_element(values.begin(), values.end()), 1e-300);
  const int width = 2 * kMargin + kCell * static_cast<int>(p.cols());
  const int height = 2 * kMargin + kCell * static_cast<int>(p.rows());

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<title>" << escape_xml(title) << "</title>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kMargin - 8
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(title) << "</text>\n";
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.cols(); ++j) {
      const double t = std::clamp(p(i, j) / peak, 0.0, 1.0);
      const int shade = static_cast<int>(255.0 * (1.0 - t));
      char fill[8];
      std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
      out << "<rect x=\"" << kMargin + kCell * static_cast<int>(j) << "\" y=\""
          << kMargin + kCell * static_cast<int>(i) << "\" width=\"" << kCell << "\" height=\"" << kCell
          << "\" fill=\"" << fill << "\"";
      if (p(i, j) > lambda) out << " stroke=\"#d62728\" stroke-width=\"2\"";
      else out << " stroke=\"#eeeeee\" stroke-width=\"0.5\"";
      out << "/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace sparse_align::cli
