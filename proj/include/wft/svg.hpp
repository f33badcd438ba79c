#pragma once

// Self-contained SVG line charts for traces and event studies: polylines,
// an optional confidence band, axis ticks, and reference lines.  Output is
// deterministic (fixed decimal formatting, no timestamps) so chart bytes can
// be digested into report manifests.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wft {

struct ChartSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f6f8b";
};

struct ChartBand {          // shaded region between lower and upper
    std::vector<double> x;
    std::vector<double> lower;
    std::vector<double> upper;
    std::string color = "#1f6f8b";
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 760;
    int height = 440;
    std::vector<ChartSeries> series;
    std::optional<ChartBand> band;
    std::optional<double> horizontal_rule;   // e.g. zero line
    std::optional<double> vertical_rule;     // e.g. policy year
};

/// Throws DataError on empty/ragged inputs.
void write_line_chart(std::ostream& out, const ChartSpec& spec);

} // namespace wft
