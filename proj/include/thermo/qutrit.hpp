#pragma once

#include "thermo/core.hpp"
#include "thermo/toy.hpp"

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace thermo::qutrit {

using Point2 = Eigen::Vector2d;

// Isometric embedding of the plane sum(x) = 1 into R^2 with the centroid at
// the origin and e_1 on the positive vertical axis.
struct SimplexEmbedding {
  static const Eigen::Matrix<double, 2, 3>& matrix();
  static Point2 embed(const RealVector& x);
  static RealVector lift(const Point2& p);
};

struct DerivativeCone {
  RealVector base;
  std::vector<Permutation> perms;  // all_permutations(3) order
  std::vector<RealVector> rays;    // -pi B pi^{-1} x
  std::vector<Point2> embedded;
  bool has_zero_ray = false;
  // Largest angle between consecutive nonzero rays.
  double max_gap = 0;
  // Cone of the rays contains no line and does not contain the zero ray.
  bool pointed = false;
  // Counterclockwise-most and clockwise-most nonzero rays; -1 when the
  // nonzero rays surround the origin.
  int left = -1;
  int right = -1;
};

DerivativeCone derv_cone(const RealVector& x, const toy::ToyGenerator& g);

struct StabCertificate {
  bool stabilisable = false;
  RealVector weights;  // convex weights over the rays summing them to zero
  RealVector alpha;    // alpha . ray < 0 for every ray otherwise
};

StabCertificate is_stabilisable(const RealVector& x, const toy::ToyGenerator& g);

enum class ConicCase { Parabolic, Elliptic, Hyperbolic, DegenerateUnital };
const char* to_string(ConicCase c);

// One arc of the stabilisable-set boundary. The base curve runs from the
// embedded Gibbs point of parameter `family` to its 2-3 transposition; `perm`
// then relabels coordinates.
struct BoundaryConic {
  ConicCase kind = ConicCase::DegenerateUnital;
  double family = 1;  // a or 1/a
  double u = 0, v = 0, w = 0;
  double lambda_max = 0;  // lambda ranges over [-lambda_max, lambda_max]
  Permutation perm{0, 1, 2};
  Point2 start, end;

  Point2 base_point(double lambda) const;
  Point2 point(double lambda) const;
  RealVector barycentric(double lambda) const;
  std::vector<Point2> sample(int count) const;
};

std::vector<BoundaryConic> stab_boundary(double a);
// Closed polygon through the six arcs, counterclockwise.
std::vector<Point2> stab_boundary_polygon(double a, int per_arc = 2000);

// Intersection of the kernels of the id and (2 3) functionals for the
// functional with parameter lambda (same parametrisation as the conic).
ProbVector kernel_intersection_point(double a, double lambda);

enum class Side { Left, Right };

struct ExtremalField {
  RealVector velocity;
  int ray = -1;
  bool degenerate = false;  // base point has a vanishing ray (a permutation of d)
};

ExtremalField extremal_field(const RealVector& x, const toy::ToyGenerator& g, Side side);

enum class Termination { WeylWall, ReachedClass, StabBoundary, MaxTime };
const char* to_string(Termination t);

struct EmbeddedCurve {
  std::vector<double> t;
  std::vector<RealVector> x;
  std::vector<Point2> p;
  Termination reason = Termination::MaxTime;
  // Wall index hit: 0 for x_s0 = x_s1, 1 for x_s1 = x_s2 in the chamber of the start.
  int wall = -1;
  int switches = 0;
};

class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, EmbeddedCurve partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const EmbeddedCurve& partial() const { return partial_; }

 private:
  EmbeddedCurve partial_;
};

struct IntegrateOptions {
  double step = 1e-3;
  double max_time = 1e3;
  double event_tol = 1e-10;
  // Optional stopping set; integration ends on entry.
  std::function<bool(const RealVector&)> stop;
};

// Follows the left or right extremal field with exact flows of the active
// permuted generator; switches, wall hits and stops are located by bisection.
EmbeddedCurve integrate_extremal(const RealVector& x0, const toy::ToyGenerator& g, Side side,
                                 const IntegrateOptions& opt = {});

// Simple polygon with distance-aware membership.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<Point2> v) : v_(std::move(v)) {}
  const std::vector<Point2>& vertices() const { return v_; }
  bool contains(const Point2& p, double margin = 0) const;
  double boundary_distance(const Point2& p) const;
  bool is_simple() const;
  double area() const;

 private:
  std::vector<Point2> v_;
};

class ReachRegion {
 public:
  // Region within the sorted chamber x1 >= x2 >= x3.
  const Polygon& chamber_part() const { return chamber_; }
  const Polygon& class_part() const { return dclass_; }
  bool is_class_of_d() const { return is_class_; }
  const EmbeddedCurve& left() const { return left_; }
  const EmbeddedCurve& right() const { return right_; }
  const RealVector& start() const { return start_; }

  bool contains(const RealVector& y, double margin = 1e-6) const;
  // The six reflected copies of the chamber pieces, for drawing.
  std::vector<std::vector<Point2>> reflected() const;
  // Closed outer boundary of [d] (six reflected extremal arcs).
  std::vector<Point2> class_boundary() const;

 private:
  friend ReachRegion reachable_set(const RealVector& x0, const toy::ToyGenerator& g, const IntegrateOptions& opt);
  RealVector start_;
  Polygon chamber_, dclass_;
  bool is_class_ = false;
  EmbeddedCurve left_, right_, d_left_, d_right_;
};

ReachRegion reachable_set(const RealVector& x0, const toy::ToyGenerator& g, const IntegrateOptions& opt = {});

enum class Order { Forward, Backward, Equivalent, Incomparable };
const char* to_string(Order o);

// Forward: y reachable from x. Backward: x reachable from y.
Order reach_order(const RealVector& x, const RealVector& y, const toy::ToyGenerator& g, double margin = 1e-6);

}  // namespace thermo::qutrit
