#pragma once

#include <string>
#include <vector>

namespace roughns {

/// Minimal self-contained SVG line plots (no external plotting dependency).
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, bool log_x = false,
            bool log_y = false);

    void add_series(std::string name, std::vector<double> x, std::vector<double> y);
    std::string render(int width = 640, int height = 420) const;
    void write_file(const std::string& path, int width = 640, int height = 420) const;

private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };
    std::string title_, x_label_, y_label_;
    bool log_x_, log_y_;
    std::vector<Series> series_;
};

} // namespace roughns
