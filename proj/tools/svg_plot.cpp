#include "svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace arrowqp::tools
{

namespace
{

constexpr double width = 640.0;
constexpr double height = 400.0;
constexpr double left = 70.0;
constexpr double right = 150.0;
constexpr double top = 40.0;
constexpr double bottom = 50.0;

const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

void frame(std::ostringstream& os, const std::string& title, const std::string& x_label, const std::string& y_label,
           double y_max)
{
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";
    const double x0 = left;
    const double y0 = height - bottom;
    os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << width - right << "\" y2=\"" << y0
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << x0 << "\" y1=\"" << top << "\" x2=\"" << x0 << "\" y2=\"" << y0 << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; t++) {
        const double v = y_max * t / 4.0;
        const double y = y0 - (y0 - top) * t / 4.0;
        os << "<text x=\"" << x0 - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
        os << "<line x1=\"" << x0 << "\" y1=\"" << y << "\" x2=\"" << width - right << "\" y2=\"" << y
           << "\" stroke=\"#ddd\"/>\n";
    }
    os << "<text x=\"" << (x0 + width - right) / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">"
       << escape(x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << (top + y0) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (top + y0) / 2 << ")\">" << escape(y_label) << "</text>\n";
}

void legend(std::ostringstream& os, const std::vector<Series>& series)
{
    for (std::size_t i = 0; i < series.size(); i++) {
        const double y = top + 20.0 * static_cast<double>(i);
        os << "<rect x=\"" << width - right + 15 << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\""
           << palette[i % 6] << "\"/>\n";
        os << "<text x=\"" << width - right + 32 << "\" y=\"" << y + 10 << "\">" << escape(series[i].label)
           << "</text>\n";
    }
}

double nice_max(double v)
{
    return v > 0.0 ? v * 1.05 : 1.0;
}

} // namespace

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<double>& x, const std::vector<Series>& series)
{
    double y_max = 0.0;
    for (const Series& s : series)
        for (double v : s.values) y_max = std::max(y_max, v);
    y_max = nice_max(y_max);
    const double x_min = x.empty() ? 0.0 : *std::min_element(x.begin(), x.end());
    const double x_max = x.empty() ? 1.0 : *std::max_element(x.begin(), x.end());
    const double span = x_max > x_min ? x_max - x_min : 1.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    auto px = [&](double v) { return left + plot_w * (v - x_min) / span; };
    auto py = [&](double v) { return height - bottom - plot_h * v / y_max; };

    std::ostringstream os;
    frame(os, title, x_label, y_label, y_max);
    for (double v : x) {
        os << "<text x=\"" << px(v) << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">" << fmt(v)
           << "</text>\n";
    }
    for (std::size_t i = 0; i < series.size(); i++) {
        os << "<polyline fill=\"none\" stroke=\"" << palette[i % 6] << "\" stroke-width=\"2\" points=\"";
        const auto& vals = series[i].values;
        for (std::size_t j = 0; j < vals.size() && j < x.size(); j++) os << px(x[j]) << "," << py(vals[j]) << " ";
        os << "\"/>\n";
    }
    legend(os, series);
    os << "</svg>\n";
    return os.str();
}

std::string stacked_bars(const std::string& title, const std::string& x_label, const std::string& y_label,
                         const std::vector<std::string>& categories, const std::vector<Series>& series)
{
    std::vector<double> totals(categories.size(), 0.0);
    for (const Series& s : series)
        for (std::size_t j = 0; j < s.values.size() && j < totals.size(); j++) totals[j] += s.values[j];
    const double y_max = nice_max(totals.empty() ? 0.0 : *std::max_element(totals.begin(), totals.end()));
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const double slot = categories.empty() ? plot_w : plot_w / static_cast<double>(categories.size());

    std::ostringstream os;
    frame(os, title, x_label, y_label, y_max);
    for (std::size_t j = 0; j < categories.size(); j++) {
        const double cx = left + slot * (static_cast<double>(j) + 0.5);
        double base = height - bottom;
        for (std::size_t i = 0; i < series.size(); i++) {
            const double v = j < series[i].values.size() ? series[i].values[j] : 0.0;
            const double h = plot_h * v / y_max;
            base -= h;
            os << "<rect x=\"" << cx - slot * 0.35 << "\" y=\"" << base << "\" width=\"" << slot * 0.7
               << "\" height=\"" << h << "\" fill=\"" << palette[i % 6] << "\"/>\n";
        }
        os << "<text x=\"" << cx << "\" y=\"" << height - bottom + 16 << "\" text-anchor=\"middle\">"
           << escape(categories[j]) << "</text>\n";
    }
    legend(os, series);
    os << "</svg>\n";
    return os.str();
}

} // namespace arrowqp::tools
