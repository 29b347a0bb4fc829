#pragma once

#include <span>
#include <string>
#include <vector>

namespace pogest {

struct PlotSeries {
    std::string label;
    std::vector<double> values;
};

// Grouped bar chart (one or two series per category) with per-category
// labels, written as a PNG.
void plot_bars(const std::string& path, const std::string& title,
               std::span<const std::string> labels, std::span<const PlotSeries> series,
               int width = 900, int height = 420);

// Polyline chart over a shared x axis.
void plot_lines(const std::string& path, const std::string& title, std::span<const double> xs,
                std::span<const PlotSeries> series, int width = 720, int height = 420);

// Histogram of values (probability density) with `bins` equal-width bins.
void plot_histogram(const std::string& path, const std::string& title,
                    std::span<const double> values, int bins, int width = 720, int height = 420);

} // namespace pogest
