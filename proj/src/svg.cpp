#include "roughns/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace roughns {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_x,
                 bool log_y)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)),
      log_x_(log_x),
      log_y_(log_y) {}

void SvgPlot::add_series(std::string name, std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("SvgPlot: size mismatch");
    series_.push_back({std::move(name), std::move(x), std::move(y)});
}

std::string SvgPlot::render(int width, int height) const {
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = width - ml - mr;
    const double ph = height - mt - mb;

    auto tx = [&](double v) { return log_x_ ? std::log10(std::max(v, 1e-300)) : v; };
    auto ty = [&](double v) { return log_y_ ? std::log10(std::max(v, 1e-300)) : v; };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_x_ && !(s.x[i] > 0.0)) continue;
            if (log_y_ && !(s.y[i] > 0.0)) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    if (!(xmin < xmax)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymin < ymax)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double xpad = 0.03 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - ymin) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

    // axes box and ticks
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\""
       << ph << "\" fill=\"none\" stroke=\"#333\"/>\n";
    const int nticks = 5;
    for (int i = 0; i <= nticks; ++i) {
        const double fx = xmin + (xmax - xmin) * i / nticks;
        const double fy = ymin + (ymax - ymin) * i / nticks;
        const double gx = ml + pw * i / nticks;
        const double gy = mt + ph - ph * i / nticks;
        os << "<line x1=\"" << gx << "\" y1=\"" << mt + ph << "\" x2=\"" << gx << "\" y2=\""
           << mt + ph + 5 << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << gx << "\" y=\"" << mt + ph + 18
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
           << fmt(log_x_ ? std::pow(10.0, fx) : fx) << "</text>\n";
        os << "<line x1=\"" << ml - 5 << "\" y1=\"" << gy << "\" x2=\"" << ml << "\" y2=\""
           << gy << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << gy + 3
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
           << fmt(log_y_ ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << x_label_ << "</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << y_label_ << "</text>\n";

    for (std::size_t si = 0; si < series_.size(); ++si) {
        const auto& s = series_[si];
        const char* color = kPalette[si % 8];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_x_ && !(s.x[i] > 0.0)) continue;
            if (log_y_ && !(s.y[i] > 0.0)) continue;
            os << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        os << "\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (log_x_ && !(s.x[i] > 0.0)) continue;
            if (log_y_ && !(s.y[i] > 0.0)) continue;
            os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
               << "\" r=\"2.4\" fill=\"" << color << "\"/>\n";
        }
        os << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 14 * static_cast<double>(si)
           << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
           << s.name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void SvgPlot::write_file(const std::string& path, int width, int height) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("SvgPlot: cannot open " + path);
    os << render(width, height);
}

} // namespace roughns
