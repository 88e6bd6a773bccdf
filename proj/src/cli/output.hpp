#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace kamlab::cli::detail {

std::string num(double v);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

/// Writes to a hidden temporary in `dir` and renames it over `name`.
void write_atomic(const std::filesystem::path& dir, const std::string& name, const std::string& content);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
  bool scatter = false;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool log_x = false;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

std::string svg_plot(const PlotSpec& spec);

}  // namespace kamlab::cli::detail
