#pragma once

#include <string>

#include "sparse_align/ot_core.hpp"

namespace sparse_align::cli {

enum class HeatmapFormat { None, Text, Svg };

HeatmapFormat parse_heatmap_format(const std::string& name);

// One character per cell: '#' active (mass > lambda), '+' nonzero but
// inactive, '.' zero.
std::string text_heatmap(const TransportPlan& p, double lambda);

// Static SVG: cells shaded by mass relative to the largest entry, active
// cells outlined.
std::string svg_heatmap(const TransportPlan& p, double lambda, const std::string& title);

}  // namespace sparse_align::cli
