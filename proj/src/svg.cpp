#include "geoscale/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "geoscale/error.hpp"

namespace geoscale {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Round tick spacing to 1/2/5 x 10^k.
double nice_step(double span, int target_ticks) {
  double raw = span / std::max(target_ticks, 1);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double r = raw / mag;
  double step = (r < 1.5) ? 1.0 : (r < 3.5) ? 2.0 : (r < 7.5) ? 5.0 : 10.0;
  return step * mag;
}

}  // namespace

SvgPlot::SvgPlot(int width_px, int height_px, std::string title)
    : width_(width_px), height_(height_px), title_(std::move(title)) {}

void SvgPlot::add_polyline(const std::vector<Eigen::Vector2d>& points,
                           const std::string& color, double stroke_width) {
  if (points.size() < 2) return;
  series_.push_back({points, color, stroke_width});
}

void SvgPlot::add_marker(const Eigen::Vector2d& point,
                         const std::string& color, double radius_px) {
  markers_.push_back({point, color, radius_px});
}

void SvgPlot::write(const std::string& path) const {
  double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series_)
    for (const auto& p : s.points) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
  for (const auto& m : markers_) {
    xmin = std::min(xmin, m.point.x());
    xmax = std::max(xmax, m.point.x());
    ymin = std::min(ymin, m.point.y());
    ymax = std::max(ymax, m.point.y());
  }
  if (!(xmin <= xmax)) {  // nothing to draw
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  double padx = 0.04 * (xmax - xmin);
  double pady = 0.04 * (ymax - ymin);
  xmin -= padx;
  xmax += padx;
  ymin -= pady;
  ymax += pady;

  const double ml = 62, mr = 16, mt = 34, mb = 46;  // margins
  const double pw = width_ - ml - mr;
  const double ph = height_ - mt - mb;
  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " "
      << height_ << "\">\n"
      << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "  <text x=\"" << width_ / 2.0 << "\" y=\"20\" font-family=\"sans-serif\""
      << " font-size=\"14\" text-anchor=\"middle\">" << title_ << "</text>\n"
      << "  <rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Ticks.
  double stepx = nice_step(xmax - xmin, 6);
  for (double t = std::ceil(xmin / stepx) * stepx; t <= xmax + 1e-12 * stepx;
       t += stepx) {
    double px = sx(t);
    out << "  <line x1=\"" << fmt(px) << "\" y1=\"" << mt + ph << "\" x2=\""
        << fmt(px) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << fmt(px) << "\" y=\"" << mt + ph + 20
        << "\" font-family=\"sans-serif\" font-size=\"11\""
        << " text-anchor=\"middle\">" << fmt(t) << "</text>\n";
  }
  double stepy = nice_step(ymax - ymin, 6);
  for (double t = std::ceil(ymin / stepy) * stepy; t <= ymax + 1e-12 * stepy;
       t += stepy) {
    double py = sy(t);
    out << "  <line x1=\"" << ml - 5 << "\" y1=\"" << fmt(py) << "\" x2=\""
        << ml << "\" y2=\"" << fmt(py) << "\" stroke=\"black\"/>\n";
    out << "  <text x=\"" << ml - 8 << "\" y=\"" << fmt(py + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\""
        << " text-anchor=\"end\">" << fmt(t) << "</text>\n";
  }

  for (const auto& s : series_) {
    out << "  <polyline fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"" << fmt(s.width) << "\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) out << " ";
      out << fmt(sx(s.points[i].x())) << "," << fmt(sy(s.points[i].y()));
    }
    out << "\"/>\n";
  }
  for (const auto& m : markers_) {
    out << "  <circle cx=\"" << fmt(sx(m.point.x())) << "\" cy=\""
        << fmt(sy(m.point.y())) << "\" r=\"" << fmt(m.radius) << "\" fill=\""
        << m.color << "\"/>\n";
  }
  out << "</svg>\n";

  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error::io("EmptyFile", "cannot open file for writing", path);
  f << out.str();
  if (!f) throw Error::io("EmptyFile", "short write", path);
}

}  // namespace geoscale
