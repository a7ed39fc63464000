#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace thermo::svg {

using Point2 = Eigen::Vector2d;

struct Style {
  std::string stroke = "black";
  std::string fill = "none";
  double width = 1.5;
  double opacity = 1.0;
  std::string dash;
};

// Fixed 800x700 viewBox; data coordinates map affinely onto it with equal
// axis scales and y pointing up.
class Canvas {
 public:
  Canvas(double xmin, double xmax, double ymin, double ymax);
  // Frame fitting the embedded probability simplex.
  static Canvas simplex();

  Point2 map(const Point2& p) const;
  void polyline(const std::vector<Point2>& pts, const Style& s = {});
  void polygon(const std::vector<Point2>& pts, const Style& s = {});
  void line(const Point2& a, const Point2& b, const Style& s = {});
  void circle(const Point2& c, double radius_px, const Style& s = {});
  void text(const Point2& at, const std::string& label, int size = 14);
  void arrow(const Point2& from, const Point2& to, const Style& s = {});
  void raw(const std::string& fragment);

  std::string str() const;

 private:
  double sx_, ox_, oy_;
  std::string body_;
};

// Simplex outline and the three Weyl chamber lines.
void draw_simplex(Canvas& c, bool chambers = true);

}  // namespace thermo::svg
