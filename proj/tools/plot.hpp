#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ists::cli {

struct BarGroup {
    std::string label;
    std::vector<double> values;
};

/// Grouped bar chart of values in [0,1], one colour per series.
void plot_bars(const std::filesystem::path& path, const std::string& title, const std::vector<std::string>& series,
               const std::vector<BarGroup>& groups);

struct Curve {
    std::string label;
    std::vector<double> y;
};

/// Line chart over categorical x positions, y in [0,1].
void plot_curves(const std::filesystem::path& path, const std::string& title, const std::vector<std::string>& x_labels,
                 const std::vector<Curve>& curves);

}  // namespace ists::cli
