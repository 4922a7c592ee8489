#ifndef ARROWQP_TOOLS_SVG_PLOT_HPP
#define ARROWQP_TOOLS_SVG_PLOT_HPP

#include <string>
#include <vector>

namespace arrowqp::tools
{

struct Series
{
    std::string label;
    std::vector<double> values;
};

// Line chart of one or more series over shared x positions.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<double>& x, const std::vector<Series>& series);

// Stacked bar chart, one bar per category, one segment per series.
std::string stacked_bars(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<std::string>& categories, const std::vector<Series>& series);

} // namespace arrowqp::tools

#endif
