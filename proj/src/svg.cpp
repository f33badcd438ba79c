#include "wft/svg.hpp"
#include "wft/csv.hpp"
#include "wft/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace wft {

namespace {

constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 48;

struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (lo == hi) {
            lo -= 1.0;
            hi += 1.0;
        } else {
            const double margin = 0.05 * (hi - lo);
            lo -= margin;
            hi += margin;
        }
    }
};

// "Nice" tick step: 1/2/5 times a power of ten covering the span in ~6 steps.
double tick_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    if (norm < 1.5) return mag;
    if (norm < 3.5) return 2.0 * mag;
    if (norm < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

} // namespace

void write_line_chart(std::ostream& out, const ChartSpec& spec) {
    if (spec.series.empty() && !spec.band)
        throw DataError("chart has no series and no band");

    Extent xe, ye;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size())
            throw DataError("series '" + s.label + "' has ragged x/y lengths");
        if (s.x.empty()) throw DataError("series '" + s.label + "' is empty");
        for (double v : s.x) xe.add(v);
        for (double v : s.y) ye.add(v);
    }
    if (spec.band) {
        const auto& b = *spec.band;
        if (b.x.size() != b.lower.size() || b.x.size() != b.upper.size())
            throw DataError("band has ragged lengths");
        if (b.x.empty()) throw DataError("band is empty");
        for (double v : b.x) xe.add(v);
        for (double v : b.lower) ye.add(v);
        for (double v : b.upper) ye.add(v);
    }
    if (spec.horizontal_rule) ye.add(*spec.horizontal_rule);
    xe.pad();
    ye.pad();

    const double plot_w = spec.width - kMarginLeft - kMarginRight;
    const double plot_h = spec.height - kMarginTop - kMarginBottom;
    auto sx = [&](double v) {
        return kMarginLeft + plot_w * (v - xe.lo) / (xe.hi - xe.lo);
    };
    auto sy = [&](double v) {
        return kMarginTop + plot_h * (1.0 - (v - ye.lo) / (ye.hi - ye.lo));
    };
    auto fx = [&](double v) { return format_fixed(v, 2); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width
        << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width << " "
        << spec.height << "\">\n";
    out << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        out << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << escape(spec.title)
            << "</text>\n";

    // Gridlines and ticks.
    const double xs = tick_step(xe.hi - xe.lo);
    const double ys = tick_step(ye.hi - ye.lo);
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
    for (double v = std::ceil(xe.lo / xs) * xs; v <= xe.hi + 1e-9 * xs; v += xs) {
        out << "<line x1=\"" << fx(sx(v)) << "\" y1=\"" << fx(kMarginTop) << "\" x2=\""
            << fx(sx(v)) << "\" y2=\"" << fx(kMarginTop + plot_h)
            << "\" stroke=\"#e4e4e4\"/>\n";
        out << "<text x=\"" << fx(sx(v)) << "\" y=\"" << fx(kMarginTop + plot_h + 16)
            << "\" text-anchor=\"middle\">" << format_double(v) << "</text>\n";
    }
    for (double v = std::ceil(ye.lo / ys) * ys; v <= ye.hi + 1e-9 * ys; v += ys) {
        out << "<line x1=\"" << fx(kMarginLeft) << "\" y1=\"" << fx(sy(v)) << "\" x2=\""
            << fx(kMarginLeft + plot_w) << "\" y2=\"" << fx(sy(v))
            << "\" stroke=\"#e4e4e4\"/>\n";
        out << "<text x=\"" << fx(kMarginLeft - 6) << "\" y=\"" << fx(sy(v) + 4)
            << "\" text-anchor=\"end\">" << format_double(v) << "</text>\n";
    }
    out << "</g>\n";

    // Frame.
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
        << fx(plot_w) << "\" height=\"" << fx(plot_h)
        << "\" fill=\"none\" stroke=\"#777\"/>\n";

    if (spec.band) {
        const auto& b = *spec.band;
        out << "<path d=\"M";
        for (std::size_t i = 0; i < b.x.size(); ++i)
            out << (i ? " L" : "") << fx(sx(b.x[i])) << " " << fx(sy(b.upper[i]));
        for (std::size_t i = b.x.size(); i-- > 0;)
            out << " L" << fx(sx(b.x[i])) << " " << fx(sy(b.lower[i]));
        out << " Z\" fill=\"" << b.color << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    }
    if (spec.horizontal_rule)
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fx(sy(*spec.horizontal_rule))
            << "\" x2=\"" << fx(kMarginLeft + plot_w) << "\" y2=\""
            << fx(sy(*spec.horizontal_rule))
            << "\" stroke=\"#999\" stroke-dasharray=\"5 3\"/>\n";
    if (spec.vertical_rule && *spec.vertical_rule >= xe.lo && *spec.vertical_rule <= xe.hi)
        out << "<line x1=\"" << fx(sx(*spec.vertical_rule)) << "\" y1=\"" << kMarginTop
            << "\" x2=\"" << fx(sx(*spec.vertical_rule)) << "\" y2=\""
            << fx(kMarginTop + plot_h)
            << "\" stroke=\"#b55\" stroke-dasharray=\"5 3\"/>\n";

    for (const auto& s : spec.series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out << (i ? " " : "") << fx(sx(s.x[i])) << "," << fx(sy(s.y[i]));
        out << "\"/>\n";
    }

    // Legend.
    if (!spec.series.empty()) {
        double ly = kMarginTop + 14;
        for (const auto& s : spec.series) {
            if (s.label.empty()) continue;
            out << "<line x1=\"" << kMarginLeft + 10 << "\" y1=\"" << fx(ly - 4)
                << "\" x2=\"" << kMarginLeft + 34 << "\" y2=\"" << fx(ly - 4)
                << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << kMarginLeft + 40 << "\" y=\"" << fx(ly)
                << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">"
                << escape(s.label) << "</text>\n";
            ly += 16;
        }
    }

    if (!spec.x_label.empty())
        out << "<text x=\"" << kMarginLeft + static_cast<int>(plot_w) / 2 << "\" y=\""
            << spec.height - 10 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"12\" fill=\"#333\">" << escape(spec.x_label) << "</text>\n";
    if (!spec.y_label.empty())
        out << "<text x=\"16\" y=\"" << kMarginTop + static_cast<int>(plot_h) / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "fill=\"#333\" transform=\"rotate(-90 16 "
            << kMarginTop + static_cast<int>(plot_h) / 2 << ")\">" << escape(spec.y_label)
            << "</text>\n";

    out << "</svg>\n";
}

} // namespace wft
