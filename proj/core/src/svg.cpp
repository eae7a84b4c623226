#include "nodallab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "nodallab/errors.hpp"

namespace nodallab {

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

SvgDoc::SvgDoc(double width, double height) : width_(width), height_(height) {}

void SvgDoc::rect(double x, double y, double w, double h, const std::string& fill) {
  body_ += "<rect x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" width=\"" + svg_num(w) +
           "\" height=\"" + svg_num(h) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgDoc::circle(double cx, double cy, double r, const std::string& fill,
                    const std::string& stroke, double stroke_width) {
  body_ += "<circle cx=\"" + svg_num(cx) + "\" cy=\"" + svg_num(cy) + "\" r=\"" + svg_num(r) +
           "\" fill=\"" + fill + "\"";
  if (stroke != "none")
    body_ += " stroke=\"" + stroke + "\" stroke-width=\"" + svg_num(stroke_width) + "\"";
  body_ += "/>\n";
}

void SvgDoc::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double width) {
  body_ += "<line x1=\"" + svg_num(x1) + "\" y1=\"" + svg_num(y1) + "\" x2=\"" + svg_num(x2) +
           "\" y2=\"" + svg_num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           svg_num(width) + "\"/>\n";
}

void SvgDoc::path(const std::string& d, const std::string& fill, const std::string& stroke,
                  double stroke_width, double opacity) {
  body_ += "<path d=\"" + d + "\" fill=\"" + fill + "\"";
  if (stroke != "none")
    body_ += " stroke=\"" + stroke + "\" stroke-width=\"" + svg_num(stroke_width) + "\"";
  if (opacity != 1.0) body_ += " fill-opacity=\"" + svg_num(opacity) + "\"";
  body_ += "/>\n";
}

void SvgDoc::polyline(const std::vector<std::array<double, 2>>& pts, const std::string& stroke,
                      double width) {
  body_ += "<polyline points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) body_ += ' ';
    body_ += svg_num(pts[i][0]) + "," + svg_num(pts[i][1]);
  }
  body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + svg_num(width) +
           "\"/>\n";
}

void SvgDoc::text(double x, double y, const std::string& s, double px,
                  const std::string& anchor, const std::string& fill) {
  body_ += "<text x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" font-size=\"" +
           svg_num(px) + "\" font-family=\"monospace\" text-anchor=\"" + anchor +
           "\" fill=\"" + fill + "\">" + s + "</text>\n";
}

std::string SvgDoc::str() const {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" "
         "viewBox=\"0 0 " +
         svg_num(width_) + " " + svg_num(height_) + "\" width=\"" + svg_num(width_) +
         "\" height=\"" + svg_num(height_) + "\">\n" + body_ + "</svg>\n";
}

void SvgDoc::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << str();
}

void write_loglog_plot(const std::string& path, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel,
                       const std::vector<PlotSeries>& series,
                       const std::vector<PlotLine>& lines) {
  double lx_min = 1e300, lx_max = -1e300, ly_min = 1e300, ly_max = -1e300;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (!(p[0] > 0.0) || !(p[1] > 0.0))
        throw PreconditionViolation("log-log plot needs positive coordinates");
      lx_min = std::min(lx_min, std::log10(p[0]));
      lx_max = std::max(lx_max, std::log10(p[0]));
      ly_min = std::min(ly_min, std::log10(p[1]));
      ly_max = std::max(ly_max, std::log10(p[1]));
    }
  if (lx_max < lx_min) throw PreconditionViolation("log-log plot needs at least one point");
  if (lx_max - lx_min < 1e-9) lx_max = lx_min + 1.0;
  if (ly_max - ly_min < 1e-9) ly_max = ly_min + 1.0;
  const double pad_x = 0.05 * (lx_max - lx_min), pad_y = 0.10 * (ly_max - ly_min);
  lx_min -= pad_x;
  lx_max += pad_x;
  ly_min -= pad_y;
  ly_max += pad_y;

  const double W = 640, H = 480, L = 70, R = 20, T = 40, B = 50;
  auto px = [&](double lx) { return L + (lx - lx_min) / (lx_max - lx_min) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - ly_min) / (ly_max - ly_min) * (H - T - B); };

  SvgDoc doc(W, H);
  doc.rect(0, 0, W, H, "#ffffff");
  doc.line(L, H - B, W - R, H - B, "#333333", 1.0);
  doc.line(L, T, L, H - B, "#333333", 1.0);

  // decade ticks (and a mid-decade minor grid when the span is short)
  for (int e = static_cast<int>(std::floor(lx_min)); e <= static_cast<int>(std::ceil(lx_max));
       ++e) {
    if (e < lx_min || e > lx_max) continue;
    doc.line(px(e), T, px(e), H - B, "#dddddd", 0.5);
    char lab[32];
    std::snprintf(lab, sizeof(lab), "1e%d", e);
    doc.text(px(e), H - B + 16, lab, 11, "middle");
  }
  for (int e = static_cast<int>(std::floor(ly_min)); e <= static_cast<int>(std::ceil(ly_max));
       ++e) {
    if (e < ly_min || e > ly_max) continue;
    doc.line(L, py(e), W - R, py(e), "#dddddd", 0.5);
    char lab[32];
    std::snprintf(lab, sizeof(lab), "1e%d", e);
    doc.text(L - 6, py(e) + 4, lab, 11, "end");
  }

  for (const auto& ln : lines) {
    const double y1 = ln.slope * lx_min + ln.intercept;
    const double y2 = ln.slope * lx_max + ln.intercept;
    doc.line(px(lx_min), py(y1), px(lx_max), py(y2), ln.color, 1.2);
    if (!ln.label.empty()) doc.text(px(lx_max) - 4, py(y2) - 6, ln.label, 11, "end", ln.color);
  }
  for (const auto& s : series)
    for (const auto& p : s.points)
      doc.circle(px(std::log10(p[0])), py(std::log10(p[1])), 2.5, s.color);

  double ly_legend = T + 4;
  for (const auto& s : series) {
    doc.circle(L + 10, ly_legend + 4, 3, s.color);
    doc.text(L + 18, ly_legend + 8, s.name, 11);
    ly_legend += 16;
  }
  doc.text(W / 2, T - 14, title, 13, "middle");
  doc.text(W / 2, H - 12, xlabel, 12, "middle");
  doc.text(14, T - 14, ylabel, 12, "start");
  doc.save(path);
}

}  // namespace nodallab
