#pragma once

#include <string>

namespace perturbmap {

enum class PlotKind { kLine, kHistogram };

PlotKind plot_kind_from_name(const std::string& name);  // "line" | "histogram"

// Renders one of the benchmark CSV outputs as a standalone SVG document.
// Line plots expect columns c (x), M (series), mean_abs_error (y); histograms
// expect M (series), r (x), exceed_count (bar height). Leading '#' comment
// lines are skipped; a missing column, missing header, or malformed number
// throws std::invalid_argument, while a header with no data rows renders bare
// axes. Output is deterministic for identical input.
std::string render_plot_svg(const std::string& csv_text, PlotKind kind);

}  // namespace perturbmap
