#pragma once

#include <array>
#include <string>
#include <vector>

namespace nodallab {

/// Deterministic short decimal for SVG attributes ("%.6g").
std::string svg_num(double v);

/// Minimal immediate-mode SVG document builder.
class SvgDoc {
 public:
  SvgDoc(double width, double height);

  void rect(double x, double y, double w, double h, const std::string& fill);
  void circle(double cx, double cy, double r, const std::string& fill,
              const std::string& stroke = "none", double stroke_width = 0.0);
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width);
  void path(const std::string& d, const std::string& fill, const std::string& stroke,
            double stroke_width, double opacity = 1.0);
  void polyline(const std::vector<std::array<double, 2>>& pts, const std::string& stroke,
                double width);
  void text(double x, double y, const std::string& s, double px,
            const std::string& anchor = "start", const std::string& fill = "#111111");

  std::string str() const;
  void save(const std::string& path) const;

 private:
  double width_;
  double height_;
  std::string body_;
};

struct PlotSeries {
  std::string name;
  std::string color;
  std::vector<std::array<double, 2>> points;  ///< (x, y), both must be > 0
};

struct PlotLine {
  double slope = 0.0;        ///< in log10-log10 coordinates
  double intercept = 0.0;    ///< log10(y) at log10(x) = 0
  std::string color;
  std::string label;
};

/// Log-log scatter with optional straight reference/fit lines.
void write_loglog_plot(const std::string& path, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel,
                       const std::vector<PlotSeries>& series,
                       const std::vector<PlotLine>& lines);

}  // namespace nodallab
