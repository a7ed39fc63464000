#include "thermo/qutrit.hpp"

#include "thermo/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace thermo::qutrit {

namespace {

constexpr double kPi = std::numbers::pi;

void require_qutrit(const toy::ToyGenerator& g) {
  if (g.dim() != 3) throw InvalidInput("qutrit routines need a 3x3 generator");
}

void require_point(const RealVector& x) {
  if (x.size() != 3) throw InvalidInput("expected a 3-component probability vector");
  require_finite(x, "state");
}

double cross2(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const double d1 = cross2(b - a, c - a), d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c), d4 = cross2(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

Point2 permute_embedded(const Permutation& p, const Point2& q) {
  return SimplexEmbedding::embed(permute(p, SimplexEmbedding::lift(q)));
}

// Joins arcs whose endpoints coincide into one closed loop.
std::vector<Point2> chain_arcs(std::vector<std::vector<Point2>> arcs, double tol) {
  std::vector<Point2> loop;
  if (arcs.empty()) return loop;
  std::vector<char> used(arcs.size(), 0);
  loop = arcs[0];
  used[0] = 1;
  for (size_t step = 1; step < arcs.size(); ++step) {
    const Point2 tail = loop.back();
    bool found = false;
    for (size_t k = 0; k < arcs.size() && !found; ++k) {
      if (used[k]) continue;
      auto arc = arcs[k];
      if ((arc.back() - tail).norm() < tol) std::reverse(arc.begin(), arc.end());
      if ((arc.front() - tail).norm() < tol) {
        loop.insert(loop.end(), arc.begin() + 1, arc.end());
        used[k] = 1;
        found = true;
      }
    }
    if (!found) throw InternalError("boundary arcs do not join into a closed curve");
  }
  if ((loop.front() - loop.back()).norm() < tol) loop.pop_back();
  return loop;
}

double signed_area(const std::vector<Point2>& v) {
  double s = 0;
  for (size_t i = 0; i < v.size(); ++i) s += cross2(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Embedding and cones

const Eigen::Matrix<double, 2, 3>& SimplexEmbedding::matrix() {
  static const Eigen::Matrix<double, 2, 3> p = [] {
    Eigen::Matrix<double, 2, 3> m;
    m << 0, -1 / std::sqrt(2.0), 1 / std::sqrt(2.0), std::sqrt(2.0 / 3.0), -1 / std::sqrt(6.0), -1 / std::sqrt(6.0);
    return m;
  }();
  return p;
}

Point2 SimplexEmbedding::embed(const RealVector& x) {
  if (x.size() != 3) throw InvalidInput("embedding needs 3 components");
  return matrix() * x;
}

RealVector SimplexEmbedding::lift(const Point2& p) {
  RealVector x = matrix().transpose() * p;
  x.array() += 1.0 / 3.0;
  return x;
}

DerivativeCone derv_cone(const RealVector& x, const toy::ToyGenerator& g) {
  require_qutrit(g);
  require_point(x);
  DerivativeCone c;
  c.base = x;
  c.perms = all_permutations(3);
  double scale = 0;
  for (const auto& p : c.perms) {
    const RealMatrix pm = permutation_matrix(p);
    RealVector r = -(pm * g.b() * pm.transpose()) * x;
    scale = std::max(scale, r.norm());
    c.rays.push_back(r);
    c.embedded.push_back(SimplexEmbedding::embed(r));
  }
  const double zero = 1e-12 * std::max(scale, 1e-300);
  std::vector<std::pair<double, int>> angles;
  for (size_t k = 0; k < c.rays.size(); ++k) {
    if (c.embedded[k].norm() <= zero || scale == 0) {
      c.has_zero_ray = true;
      continue;
    }
    double th = std::atan2(c.embedded[k].y(), c.embedded[k].x());
    if (th < 0) th += 2 * kPi;
    angles.emplace_back(th, static_cast<int>(k));
  }
  if (angles.empty()) return c;
  std::stable_sort(angles.begin(), angles.end(), [](auto& a, auto& b) { return a.first < b.first; });
  const size_t m = angles.size();
  int gap_after = 0;
  double best = -1;
  for (size_t j = 0; j < m; ++j) {
    const double next = j + 1 < m ? angles[j + 1].first : angles[0].first + 2 * kPi;
    const double gap = next - angles[j].first;
    if (gap > best) {
      best = gap;
      gap_after = static_cast<int>(j);
    }
  }
  c.max_gap = best;
  if (best >= kPi - 1e-12) {
    c.left = angles[gap_after].second;
    c.right = angles[(gap_after + 1) % m].second;
  }
  c.pointed = !c.has_zero_ray && best > kPi + 1e-12;
  return c;
}

StabCertificate is_stabilisable(const RealVector& x, const toy::ToyGenerator& g) {
  const DerivativeCone cone = derv_cone(x, g);
  const int k = static_cast<int>(cone.rays.size());
  StabCertificate cert;
  lp::Problem feas(k);
  feas.add(RealVector::Ones(k), lp::Sense::Equal, 1.0);
  for (int row = 0; row < 2; ++row) {
    RealVector coeffs(k);
    for (int j = 0; j < k; ++j) coeffs[j] = cone.embedded[j][row];
    feas.add(coeffs, lp::Sense::Equal, 0.0);
  }
  feas.set_objective(RealVector::Zero(k));
  const lp::Solution s1 = lp::solve(feas);
  if (s1.status == lp::Status::Optimal) {
    cert.stabilisable = true;
    cert.weights = s1.x;
    return cert;
  }
  lp::Problem sep(2);
  sep.set_free(0);
  sep.set_free(1);
  for (int j = 0; j < k; ++j) sep.add(cone.embedded[j], lp::Sense::LessEq, -1.0);
  sep.set_objective(RealVector::Zero(2));
  const lp::Solution s2 = lp::solve(sep);
  if (s2.status == lp::Status::Optimal) cert.alpha = SimplexEmbedding::matrix().transpose() * s2.x;
  return cert;
}

// ---------------------------------------------------------------------------
// Boundary conics

const char* to_string(ConicCase c) {
  switch (c) {
    case ConicCase::Parabolic: return "parabolic";
    case ConicCase::Elliptic: return "elliptic";
    case ConicCase::Hyperbolic: return "hyperbolic";
    case ConicCase::DegenerateUnital: return "degenerate";
  }
  return "?";
}

Point2 BoundaryConic::base_point(double lambda) const {
  const double l2 = lambda * lambda;
  switch (kind) {
    case ConicCase::Parabolic: return {lambda / std::sqrt(2.0), (1 + 14 * l2) / std::sqrt(6.0)};
    case ConicCase::Hyperbolic: return {w * (-2 * lambda) / (l2 - 1), u * (l2 + 1) / (l2 - 1) + v};
    case ConicCase::Elliptic: return {w * 2 * lambda / (l2 + 1), u * (l2 - 1) / (l2 + 1) + v};
    case ConicCase::DegenerateUnital: return Point2::Zero();
  }
  return Point2::Zero();
}

Point2 BoundaryConic::point(double lambda) const { return permute_embedded(perm, base_point(lambda)); }

RealVector BoundaryConic::barycentric(double lambda) const { return SimplexEmbedding::lift(point(lambda)); }

std::vector<Point2> BoundaryConic::sample(int count) const {
  std::vector<Point2> out;
  if (kind == ConicCase::DegenerateUnital || count < 2) {
    out.push_back(point(0));
    return out;
  }
  // Runs from start to end.
  const double sgn = (point(-lambda_max) - start).norm() < (point(lambda_max) - start).norm() ? 1.0 : -1.0;
  for (int i = 0; i < count; ++i) {
    const double s = -1.0 + 2.0 * i / (count - 1);
    out.push_back(point(sgn * s * lambda_max));
  }
  return out;
}

namespace {

RealVector ladder_gibbs(double f) {
  RealVector d(3);
  d << 1, f, f * f;
  return d / d.sum();
}

BoundaryConic base_conic(double f) {
  BoundaryConic c;
  c.family = f;
  const double r = std::sqrt(2.0 / 3.0);
  if (std::abs(f - 0.25) < 1e-9) {
    c.kind = ConicCase::Parabolic;
  } else {
    c.kind = f > 0.25 ? ConicCase::Hyperbolic : ConicCase::Elliptic;
    const double vmu = r * (1 - f) / (1 + 2 * f);
    const double upv = r * (1 - f) / (1 - 4 * f);
    c.v = 0.5 * (vmu + upv);
    c.u = 0.5 * (upv - vmu);
    c.w = std::sqrt(2.0) * (1 - f) * f / std::sqrt(std::abs((1 + 2 * f) * (3 + 2 * f) * (1 - 4 * f)));
  }
  const RealVector d = ladder_gibbs(f);
  RealVector dt = d;
  std::swap(dt[1], dt[2]);
  const Point2 target = SimplexEmbedding::embed(d);
  const Point2 other = SimplexEmbedding::embed(dt);
  const double xt = std::abs(target.x());
  double lam;
  if (c.kind == ConicCase::Parabolic) {
    lam = std::sqrt(2.0) * xt;
  } else {
    if (c.kind == ConicCase::Elliptic && xt > std::abs(c.w) * (1 + 1e-12))
      throw InternalError("Gibbs point lies outside the elliptic arc");
    double lo = 0, hi = c.kind == ConicCase::Elliptic ? 1.0 : 1.0 - 1e-15;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (std::abs(c.base_point(mid).x()) < xt)
        lo = mid;
      else
        hi = mid;
    }
    lam = 0.5 * (lo + hi);
  }
  c.lambda_max = lam;
  const Point2 plus = c.base_point(lam), minus = c.base_point(-lam);
  const bool plus_is_d = (plus - target).norm() < (minus - target).norm();
  c.start = plus_is_d ? plus : minus;
  c.end = plus_is_d ? minus : plus;
  if ((c.start - target).norm() > 1e-7 || (c.end - other).norm() > 1e-7) {
    std::ostringstream os;
    os << "conic arc for a=" << f << " misses the Gibbs point by " << (c.start - target).norm();
    throw InternalError(os.str());
  }
  return c;
}

}  // namespace

std::vector<BoundaryConic> stab_boundary(double a) {
  if (!(a > 0) || !std::isfinite(a)) throw InvalidInput("ladder parameter a must be positive");
  if (std::abs(a - 1) < 1e-12) {
    BoundaryConic c;
    c.kind = ConicCase::DegenerateUnital;
    c.start = c.end = Point2::Zero();
    return {c};
  }
  const std::vector<Permutation> cyclic = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  std::vector<BoundaryConic> out;
  for (const double f : {a, 1 / a}) {
    const BoundaryConic base = base_conic(f);
    for (const auto& p : cyclic) {
      BoundaryConic c = base;
      c.perm = p;
      c.start = permute_embedded(p, base.start);
      c.end = permute_embedded(p, base.end);
      out.push_back(c);
    }
  }
  return out;
}

std::vector<Point2> stab_boundary_polygon(double a, int per_arc) {
  const auto arcs = stab_boundary(a);
  if (arcs.size() == 1) return {Point2::Zero()};
  std::vector<std::vector<Point2>> pieces;
  for (const auto& c : arcs) pieces.push_back(c.sample(per_arc));
  auto loop = chain_arcs(pieces, 1e-8);
  if (signed_area(loop) < 0) std::reverse(loop.begin(), loop.end());
  return loop;
}

ProbVector kernel_intersection_point(double a, double lambda) {
  if (!(a > 0) || !std::isfinite(a)) throw InvalidInput("ladder parameter a must be positive");
  if (std::abs(a - 1) < 1e-12) throw DomainError("no kernel parametrisation at a = 1");
  const BoundaryConic c = base_conic(a);
  if (!(std::abs(lambda) <= c.lambda_max + 1e-12)) {
    std::ostringstream os;
    os << "lambda " << lambda << " outside [" << -c.lambda_max << ", " << c.lambda_max << "]";
    throw DomainError(os.str());
  }
  const double s = c.kind == ConicCase::Parabolic
                       ? 1.0
                       : 0.5 * std::sqrt(1 + 2 * a) / std::sqrt(std::abs((3 + 2 * a) * (1 - 4 * a)));
  const double l = lambda * s;
  Eigen::RowVector3d alpha(0, l - 0.5, -l - 0.5);
  const RealMatrix nb = -toy::toy_generator_ladder(a, 3).b();
  const RealMatrix t = permutation_matrix({0, 2, 1});
  const Eigen::Vector3d f_id = (alpha * nb).transpose();
  const Eigen::Vector3d f_t = (alpha * (t * nb * t)).transpose();
  Eigen::Vector3d v = f_id.cross(f_t);
  return ProbVector(RealVector(v / v.sum()));
}

// ---------------------------------------------------------------------------
// Extremal curves

ExtremalField extremal_field(const RealVector& x, const toy::ToyGenerator& g, Side side) {
  const DerivativeCone c = derv_cone(x, g);
  const int k = side == Side::Left ? c.left : c.right;
  if (k < 0) throw DomainError("derivative cone spans the plane; point is inside the stabilisable set");
  return ExtremalField{c.rays[k], k, c.has_zero_ray};
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::WeylWall: return "wall";
    case Termination::ReachedClass: return "class";
    case Termination::StabBoundary: return "stab";
    case Termination::MaxTime: return "max-time";
  }
  return "?";
}

EmbeddedCurve integrate_extremal(const RealVector& x0, const toy::ToyGenerator& g, Side side,
                                 const IntegrateOptions& opt) {
  require_qutrit(g);
  require_point(x0);
  if (!(opt.step > 0) || !(opt.max_time > 0)) throw InvalidInput("step and time limit must be positive");
  const auto perms = all_permutations(3);
  std::vector<toy::FlowPropagator> flows;
  for (const auto& p : perms) flows.emplace_back(g.permuted(p));

  const std::vector<int> order = argsort_descending(x0);
  auto wall_gap = [&](const RealVector& y, int w) { return y[order[w]] - y[order[w + 1]]; };
  auto index_at = [&](const RealVector& y) {
    const DerivativeCone c = derv_cone(y, g);
    return side == Side::Left ? c.left : c.right;
  };

  EmbeddedCurve curve;
  auto push = [&](double t, const RealVector& y) {
    curve.t.push_back(t);
    curve.x.push_back(y);
    curve.p.push_back(SimplexEmbedding::embed(y));
  };

  RealVector x = x0;
  double t = 0;
  push(t, x);
  int k = index_at(x);
  if (k < 0) throw DomainError("start point is inside the stabilisable set");

  enum Event { None, Switch, Wall, Stop, Stab };
  auto classify = [&](const RealVector& y, int& wall) -> Event {
    for (int w = 0; w < 2; ++w)
      if (wall_gap(y, w) < -opt.event_tol && wall_gap(x0, w) >= -opt.event_tol) {
        wall = w;
        return Wall;
      }
    if (opt.stop && opt.stop(y)) return Stop;
    const int idx = index_at(y);
    if (idx < 0) return Stab;
    if (idx != k) return Switch;
    return None;
  };

  int tiny_switches = 0;
  while (t < opt.max_time) {
    const double h = std::min(opt.step, opt.max_time - t);
    int wall = -1;
    RealVector y = flows[k].apply(h, x);
    Event ev = classify(y, wall);
    if (ev == None) {
      x = y;
      t += h;
      push(t, x);
      tiny_switches = 0;
      continue;
    }
    double lo = 0, hi = h;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      int w2 = -1;
      if (classify(flows[k].apply(mid, x), w2) == None)
        lo = mid;
      else
        hi = mid;
    }
    y = flows[k].apply(hi, x);
    wall = -1;
    ev = classify(y, wall);
    if (ev == None) ev = Switch;  // boundary of the bisection, treat as a switch point
    t += hi;
    switch (ev) {
      case Wall: {
        const double avg = 0.5 * (y[order[wall]] + y[order[wall + 1]]);
        y[order[wall]] = y[order[wall + 1]] = avg;
        push(t, y);
        curve.reason = Termination::WeylWall;
        curve.wall = wall;
        return curve;
      }
      case Stop:
        push(t, y);
        curve.reason = Termination::ReachedClass;
        return curve;
      case Stab:
        push(t, y);
        curve.reason = Termination::StabBoundary;
        return curve;
      default: {
        x = y;
        push(t, x);
        const int next = index_at(x);
        if (next < 0) {
          curve.reason = Termination::StabBoundary;
          return curve;
        }
        ++curve.switches;
        tiny_switches = hi < 1e-9 ? tiny_switches + 1 : 0;
        if (tiny_switches > 100) throw IntegrationFailure("extremal field chatters between rays", curve);
        k = next == k ? k : next;
        break;
      }
    }
  }
  curve.reason = Termination::MaxTime;
  return curve;
}

// ---------------------------------------------------------------------------
// Polygons

double Polygon::boundary_distance(const Point2& p) const {
  double best = kInf;
  const size_t n = v_.size();
  for (size_t i = 0; i < n; ++i) best = std::min(best, segment_distance(p, v_[i], v_[(i + 1) % n]));
  return best;
}

bool Polygon::contains(const Point2& p, double margin) const {
  const size_t n = v_.size();
  if (n == 0) return false;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = v_[i];
    const Point2& b = v_[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double xc = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < xc) inside = !inside;
    }
  }
  if (inside) return true;
  return margin > 0 && boundary_distance(p) <= margin;
}

bool Polygon::is_simple() const {
  const size_t n = v_.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(v_[i], v_[(i + 1) % n], v_[j], v_[(j + 1) % n])) return false;
    }
  return true;
}

double Polygon::area() const { return std::abs(signed_area(v_)); }

// ---------------------------------------------------------------------------
// Reachable regions

namespace {

std::vector<Point2> chamber_polygon(const EmbeddedCurve& left, const EmbeddedCurve& right) {
  std::vector<Point2> v(left.p.begin(), left.p.end());
  v.push_back(Point2::Zero());
  for (auto it = right.p.rbegin(); it != right.p.rend(); ++it) v.push_back(*it);
  if ((v.front() - v.back()).norm() < 1e-14) v.pop_back();
  // Drop consecutive duplicates (e.g. a curve ending at the centroid).
  std::vector<Point2> out;
  for (const auto& p : v)
    if (out.empty() || (p - out.back()).norm() > 1e-15) out.push_back(p);
  return out;
}

// Every boundary vertex sees the centroid without crossing an edge.
bool star_shaped_about_centroid(const Polygon& poly) {
  const auto& v = poly.vertices();
  const size_t n = v.size();
  const size_t stride = std::max<size_t>(1, n / 400);
  for (size_t i = 0; i < n; i += stride) {
    for (size_t j = 0; j < n; ++j) {
      const Point2& a = v[j];
      const Point2& b = v[(j + 1) % n];
      if (j == i || (j + 1) % n == i) continue;
      if (a.norm() < 1e-14 || b.norm() < 1e-14) continue;
      if (segments_cross(Point2::Zero(), v[i], a, b)) return false;
    }
  }
  return true;
}

}  // namespace

bool ReachRegion::contains(const RealVector& y, double margin) const {
  require_point(y);
  const Point2 p = SimplexEmbedding::embed(sorted_descending(y));
  return chamber_.contains(p, margin) || dclass_.contains(p, margin);
}

std::vector<std::vector<Point2>> ReachRegion::reflected() const {
  std::vector<std::vector<Point2>> out;
  for (const auto& p : all_permutations(3)) {
    for (const Polygon* poly : {&chamber_, &dclass_}) {
      if (is_class_ && poly == &chamber_) continue;
      std::vector<Point2> img;
      for (const auto& q : poly->vertices()) img.push_back(permute_embedded(p, q));
      out.push_back(std::move(img));
    }
  }
  return out;
}

std::vector<Point2> ReachRegion::class_boundary() const {
  std::vector<Point2> arc(d_right_.p.rbegin(), d_right_.p.rend());
  arc.insert(arc.end(), d_left_.p.begin() + 1, d_left_.p.end());
  std::vector<std::vector<Point2>> arcs;
  for (const auto& p : all_permutations(3)) {
    std::vector<Point2> img;
    for (const auto& q : arc) img.push_back(permute_embedded(p, q));
    arcs.push_back(std::move(img));
  }
  return chain_arcs(arcs, 1e-8);
}

ReachRegion reachable_set(const RealVector& x0, const toy::ToyGenerator& g, const IntegrateOptions& opt) {
  require_qutrit(g);
  require_point(x0);
  ReachRegion r;
  r.start_ = ProbVector(x0).entries();
  const RealVector xs = sorted_descending(r.start_);
  const RealVector d = sorted_descending(g.fixed_point().entries());

  IntegrateOptions dopt = opt;
  dopt.stop = nullptr;
  r.d_left_ = integrate_extremal(d, g, Side::Left, dopt);
  r.d_right_ = integrate_extremal(d, g, Side::Right, dopt);
  if (r.d_left_.reason != Termination::WeylWall || r.d_right_.reason != Termination::WeylWall ||
      r.d_left_.wall == r.d_right_.wall) {
    std::ostringstream os;
    os << "extremal curves from the fixed point end on " << to_string(r.d_left_.reason) << "/" << r.d_left_.wall
       << " and " << to_string(r.d_right_.reason) << "/" << r.d_right_.wall
       << "; expected opposite chamber walls";
    throw InternalError(os.str());
  }
  r.dclass_ = Polygon(chamber_polygon(r.d_left_, r.d_right_));

  const Point2 ps = SimplexEmbedding::embed(xs);
  if (r.dclass_.contains(ps, 1e-12)) {
    r.is_class_ = true;
    r.chamber_ = r.dclass_;
    r.left_ = r.d_left_;
    r.right_ = r.d_right_;
    return r;
  }

  const Polygon dclass = r.dclass_;
  IntegrateOptions xopt = opt;
  xopt.stop = [dclass](const RealVector& y) {
    return dclass.contains(SimplexEmbedding::embed(sorted_descending(y)), 0);
  };
  r.left_ = integrate_extremal(xs, g, Side::Left, xopt);
  r.right_ = integrate_extremal(xs, g, Side::Right, xopt);
  if (r.left_.reason != Termination::WeylWall || r.right_.reason != Termination::WeylWall) {
    if (!star_shaped_about_centroid(r.dclass_))
      throw InternalError("class of the fixed point is not star-shaped about the centroid");
  }
  r.chamber_ = Polygon(chamber_polygon(r.left_, r.right_));
  return r;
}

const char* to_string(Order o) {
  switch (o) {
    case Order::Forward: return "forward";
    case Order::Backward: return "backward";
    case Order::Equivalent: return "equivalent";
    case Order::Incomparable: return "incomparable";
  }
  return "?";
}

Order reach_order(const RealVector& x, const RealVector& y, const toy::ToyGenerator& g, double margin) {
  const bool fwd = reachable_set(x, g).contains(y, margin);
  const bool bwd = reachable_set(y, g).contains(x, margin);
  if (fwd && bwd) return Order::Equivalent;
  if (fwd) return Order::Forward;
  if (bwd) return Order::Backward;
  return Order::Incomparable;
}

}  // namespace thermo::qutrit
