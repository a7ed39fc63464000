#include "thermo/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace thermo::svg {

namespace {

constexpr double kWidth = 800, kHeight = 700, kPad = 30;

std::string fx(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

std::string attrs(const Style& s) {
  std::string a = " stroke=\"" + s.stroke + "\" fill=\"" + s.fill + "\" stroke-width=\"" + fx(s.width) + "\"";
  if (s.opacity < 1) a += " opacity=\"" + fx(s.opacity) + "\"";
  if (!s.dash.empty()) a += " stroke-dasharray=\"" + s.dash + "\"";
  return a;
}

std::string escape(const std::string& t) {
  std::string out;
  for (char ch : t) {
    if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '&') out += "&amp;";
    else out += ch;
  }
  return out;
}

}  // namespace

Canvas::Canvas(double xmin, double xmax, double ymin, double ymax) {
  sx_ = std::min((kWidth - 2 * kPad) / (xmax - xmin), (kHeight - 2 * kPad) / (ymax - ymin));
  ox_ = kWidth / 2 - sx_ * 0.5 * (xmin + xmax);
  oy_ = kHeight / 2 + sx_ * 0.5 * (ymin + ymax);
}

Canvas Canvas::simplex() {
  const double r = 1 / std::sqrt(2.0);
  return Canvas(-r, r, -1 / std::sqrt(6.0), std::sqrt(2.0 / 3.0));
}

Point2 Canvas::map(const Point2& p) const { return {ox_ + sx_ * p.x(), oy_ - sx_ * p.y()}; }

void Canvas::polyline(const std::vector<Point2>& pts, const Style& s) {
  if (pts.empty()) return;
  body_ += "<polyline points=\"";
  for (const auto& p : pts) {
    const Point2 q = map(p);
    body_ += fx(q.x()) + "," + fx(q.y()) + " ";
  }
  body_ += "\"" + attrs(s) + "/>\n";
}

void Canvas::polygon(const std::vector<Point2>& pts, const Style& s) {
  if (pts.empty()) return;
  body_ += "<polygon points=\"";
  for (const auto& p : pts) {
    const Point2 q = map(p);
    body_ += fx(q.x()) + "," + fx(q.y()) + " ";
  }
  body_ += "\"" + attrs(s) + "/>\n";
}

void Canvas::line(const Point2& a, const Point2& b, const Style& s) {
  const Point2 p = map(a), q = map(b);
  body_ += "<line x1=\"" + fx(p.x()) + "\" y1=\"" + fx(p.y()) + "\" x2=\"" + fx(q.x()) + "\" y2=\"" + fx(q.y()) +
           "\"" + attrs(s) + "/>\n";
}

void Canvas::circle(const Point2& c, double radius_px, const Style& s) {
  const Point2 p = map(c);
  body_ += "<circle cx=\"" + fx(p.x()) + "\" cy=\"" + fx(p.y()) + "\" r=\"" + fx(radius_px) + "\"" + attrs(s) +
           "/>\n";
}

void Canvas::text(const Point2& at, const std::string& label, int size) {
  const Point2 p = map(at);
  body_ += "<text x=\"" + fx(p.x()) + "\" y=\"" + fx(p.y()) + "\" font-size=\"" + std::to_string(size) +
           "\" font-family=\"sans-serif\">" + escape(label) + "</text>\n";
}

void Canvas::arrow(const Point2& from, const Point2& to, const Style& s) {
  line(from, to, s);
  const Point2 a = map(from), b = map(to);
  const Point2 dir = b - a;
  const double len = dir.norm();
  if (len < 1e-9) return;
  const Point2 u = dir / len, n(-u.y(), u.x());
  const double head = std::min(6.0, 0.4 * len);
  const Point2 l = b - head * u + 0.5 * head * n, r = b - head * u - 0.5 * head * n;
  body_ += "<polygon points=\"" + fx(b.x()) + "," + fx(b.y()) + " " + fx(l.x()) + "," + fx(l.y()) + " " +
           fx(r.x()) + "," + fx(r.y()) + "\" fill=\"" + s.stroke + "\" stroke=\"none\"/>\n";
}

void Canvas::raw(const std::string& fragment) { body_ += fragment; }

std::string Canvas::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 700\" width=\"800\" height=\"700\">\n"
         "<rect width=\"800\" height=\"700\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

void draw_simplex(Canvas& c, bool chambers) {
  const double r = 1 / std::sqrt(2.0), lo = -1 / std::sqrt(6.0), top = std::sqrt(2.0 / 3.0);
  const Point2 e1(0, top), e2(-r, lo), e3(r, lo);
  c.polygon({e1, e2, e3}, Style{"black", "none", 1.5, 1.0, ""});
  if (chambers) {
    const Style thin{"#888888", "none", 0.8, 1.0, "4 3"};
    c.line(e1, 0.5 * (e2 + e3), thin);
    c.line(e2, 0.5 * (e1 + e3), thin);
    c.line(e3, 0.5 * (e1 + e2), thin);
  }
  c.text(e1 + Point2(0.01, 0.01), "e1");
  c.text(e2 + Point2(-0.04, -0.04), "e2");
  c.text(e3 + Point2(0.01, -0.04), "e3");
}

}  // namespace thermo::svg
