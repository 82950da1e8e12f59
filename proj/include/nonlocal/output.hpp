#pragma once

#include <string>
#include <vector>

namespace nonlocal {

/// CSV with a header row, 17 significant digits, LF line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(const std::vector<double>& row);
    void add_row_mixed(const std::vector<std::string>& row);

    std::string render() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained SVG polyline plot: axes box, min/max tick labels, legend.
std::string render_line_plot(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<PlotSeries>& series);

}  // namespace nonlocal
