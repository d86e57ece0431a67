#include "osl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace osl {

namespace {

const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                         "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
    if (series.empty()) throw std::invalid_argument("write_svg_chart: no series");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty())
            throw std::invalid_argument("write_svg_chart: bad series '" + s.label + "'");
        for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
        for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
    }
    if (xmax == xmin) { xmax += 1.0; xmin -= 1.0; }
    if (ymax == ymin) { ymax += 1.0; ymin -= 1.0; }
    const double pad_y = 0.05 * (ymax - ymin);
    ymin -= pad_y;
    ymax += pad_y;

    const double width = 720, height = 420;
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(f,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" "
                 "height=\"%g\" viewBox=\"0 0 %g %g\">\n",
                 width, height, width, height);
    std::fprintf(f, "<rect width=\"%g\" height=\"%g\" fill=\"white\"/>\n", width, height);
    std::fprintf(f,
                 "<text x=\"%g\" y=\"24\" text-anchor=\"middle\" "
                 "font-family=\"sans-serif\" font-size=\"16\">%s</text>\n",
                 width / 2, title.c_str());

    // axes with 5 ticks per side
    std::fprintf(f,
                 "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                 ml, height - mb, width - mr, height - mb);
    std::fprintf(f,
                 "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                 ml, mt, ml, height - mb);
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        std::fprintf(f,
                     "<text x=\"%s\" y=\"%g\" text-anchor=\"middle\" "
                     "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                     fmt(px(fx)).c_str(), height - mb + 18, fmt(fx).c_str());
        std::fprintf(f,
                     "<text x=\"%g\" y=\"%s\" text-anchor=\"end\" "
                     "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                     ml - 6, fmt(py(fy) + 4).c_str(), fmt(fy).c_str());
        std::fprintf(f,
                     "<line x1=\"%g\" y1=\"%s\" x2=\"%g\" y2=\"%s\" "
                     "stroke=\"#dddddd\"/>\n",
                     ml, fmt(py(fy)).c_str(), width - mr, fmt(py(fy)).c_str());
    }
    std::fprintf(f,
                 "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\" "
                 "font-family=\"sans-serif\" font-size=\"13\">%s</text>\n",
                 width / 2, height - 12, x_label.c_str());
    std::fprintf(f,
                 "<text x=\"16\" y=\"%g\" text-anchor=\"middle\" "
                 "font-family=\"sans-serif\" font-size=\"13\" "
                 "transform=\"rotate(-90 16 %g)\">%s</text>\n",
                 height / 2, height / 2, y_label.c_str());

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kColors[si % (sizeof(kColors) / sizeof(kColors[0]))];
        std::fprintf(f, "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"",
                     color);
        for (std::size_t i = 0; i < s.x.size(); ++i)
            std::fprintf(f, "%s%s,%s", i ? " " : "", fmt(px(s.x[i])).c_str(),
                         fmt(py(s.y[i])).c_str());
        std::fprintf(f, "\"/>\n");
        const double ly = mt + 16.0 * static_cast<double>(si);
        std::fprintf(f,
                     "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
                     "stroke-width=\"2\"/>\n",
                     width - mr - 130, ly, width - mr - 110, ly, color);
        std::fprintf(f,
                     "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" "
                     "font-size=\"12\">%s</text>\n",
                     width - mr - 104, ly + 4, s.label.c_str());
    }
    std::fprintf(f, "</svg>\n");
    std::fclose(f);
}

}  // namespace osl
