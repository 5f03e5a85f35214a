#pragma once

#include <string>
#include <vector>

namespace dysonlab::cli {

/// Minimal SVG chart: axes, polylines, shaded bands and heatmap cells.
/// Coordinates are printed with a fixed format so output is reproducible.
class SvgChart {
 public:
  SvgChart(std::string title, std::string x_label, std::string y_label);

  void line(const std::vector<double>& x, const std::vector<double>& y, const std::string& colour,
            const std::string& label);
  void band(const std::vector<double>& x, const std::vector<double>& lo, const std::vector<double>& hi,
            const std::string& colour);
  /// Cell grid: values(i, j) at x[i], y[j], shaded from white (min) to
  /// `colour` (max).
  void heatmap(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& values,
               const std::string& colour);
  void log_y(bool on) { log_y_ = on; }

  std::string render() const;

 private:
  struct Series {
    std::vector<double> x, y, y2;
    std::string colour, label;
    enum { kLine, kBand } kind;
  };
  struct Heat {
    std::vector<double> x, y, v;
    std::string colour;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<Heat> heat_;
  bool log_y_ = false;
};

}  // namespace dysonlab::cli
