#include "nonlocal/output.hpp"

#include "nonlocal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nonlocal {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvTable::add_row(const std::vector<double>& row) {
    if (row.size() != columns_.size()) throw ValidationError("csv: row width mismatch");
    std::vector<std::string> cells;
    cells.reserve(row.size());
    for (double v : row) cells.push_back(format_double(v));
    rows_.push_back(std::move(cells));
}

void CsvTable::add_row_mixed(const std::vector<std::string>& row) {
    if (row.size() != columns_.size()) throw ValidationError("csv: row width mismatch");
    rows_.push_back(row);
}

std::string CsvTable::render() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out << ',';
        out << columns_[i];
    }
    out << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    return out.str();
}

namespace {

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

std::string render_line_plot(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<PlotSeries>& series) {
    const double width = 800, height = 500;
    const double ml = 80, mr = 30, mt = 50, mb = 60;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto sy = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" << title << "</text>\n";
    svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
        << "\" height=\"" << height - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
    // axis labels and min/max ticks
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
        << height / 2 << ")\">" << ylabel << "</text>\n";
    svg << "<text x=\"" << ml << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_tick(xmin)
        << "</text>\n";
    svg << "<text x=\"" << width - mr << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_tick(xmax)
        << "</text>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << height - mb
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_tick(ymin)
        << "</text>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << mt + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_tick(ymax)
        << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        svg << "<polyline fill=\"none\" stroke=\"" << colors[k % 5] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) svg << ' ';
            svg << fmt_coord(sx(s.x[i])) << ',' << fmt_coord(sy(s.y[i]));
        }
        svg << "\"/>\n";
        if (series.size() > 1) {
            const double lx = ml + 12, ly = mt + 18 + 18 * static_cast<double>(k);
            svg << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 24 << "\" y2=\""
                << ly - 4 << "\" stroke=\"" << colors[k % 5] << "\" stroke-width=\"2\"/>\n";
            svg << "<text x=\"" << lx + 30 << "\" y=\"" << ly
                << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace nonlocal
