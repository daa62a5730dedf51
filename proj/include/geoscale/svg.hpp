#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace geoscale {

// Minimal dependency-free SVG line plot: polylines in data coordinates,
// framed axes with tick labels, deterministic output.
class SvgPlot {
 public:
  SvgPlot(int width_px, int height_px, std::string title);

  void add_polyline(const std::vector<Eigen::Vector2d>& points,
                    const std::string& color, double stroke_width = 1.0);
  void add_marker(const Eigen::Vector2d& point, const std::string& color,
                  double radius_px = 3.0);

  void write(const std::string& path) const;

 private:
  struct Series {
    std::vector<Eigen::Vector2d> points;
    std::string color;
    double width;
  };
  struct Marker {
    Eigen::Vector2d point;
    std::string color;
    double radius;
  };
  int width_, height_;
  std::string title_;
  std::vector<Series> series_;
  std::vector<Marker> markers_;
};

}  // namespace geoscale
