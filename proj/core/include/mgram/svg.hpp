#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace mgram {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// A static line or scatter plot with linear axes.
struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool scatter = false;
};

void write_svg(const Chart& chart, std::ostream& out);
void save_svg(const Chart& chart, const std::filesystem::path& path);

}  // namespace mgram
