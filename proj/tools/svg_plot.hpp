#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ciot/lifetime.hpp"

namespace ciot::plot {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<Series> series;
};

struct StackedBars {
    std::string title;
    std::string y_label;
    std::vector<std::string> categories;
    std::vector<std::string> layers;
    std::vector<std::vector<double>> values;  // [category][layer]
};

std::string render(const LineChart& chart);
std::string render(const StackedBars& chart);

/// Writes the four sweep figures into `dir` and returns their paths. Each
/// figure is a function of the rows alone.
std::vector<std::filesystem::path> write_sweep_figures(const std::vector<SweepRow>& rows,
                                                       const std::filesystem::path& dir);

}  // namespace ciot::plot
