#pragma once

#include "thermo/core.hpp"

#include <optional>
#include <vector>

namespace thermo::thermomaj {

// Concave piecewise-linear curve through the origin, (1, sum y) and the
// elbows obtained by ordering y_i / d_i decreasingly.
class ThermoCurve {
 public:
  ThermoCurve(const RealVector& d, const RealVector& y);

  // Elbow abscissas (partial sums of d) and ordinates (partial sums of y),
  // both starting at 0.
  const RealVector& abscissas() const { return xs_; }
  const RealVector& ordinates() const { return ys_; }
  // Order in which coordinates enter the curve.
  const std::vector<int>& order() const { return order_; }

  double operator()(double c) const;
  double slope(int segment) const;
  std::vector<std::pair<double, double>> sample(int count) const;

 private:
  RealVector xs_, ys_;
  std::vector<int> order_;
};

ThermoCurve thermo_curve(const RealVector& d, const RealVector& y);

struct MajorisationCheck {
  bool holds = false;
  // First index i whose 1-norm inequality fails, if any.
  std::optional<int> violated;
  // Largest violation margin among the n inequalities (<= 0 when holds).
  double worst_margin = 0;
};

// x is d-majorised by y: equal totals and
// ||d_i x - y_i d||_1 <= ||d_i y - y_i d||_1 for every i.
MajorisationCheck d_majorises(const RealVector& x, const RealVector& y, const RealVector& d, double tol = 1e-9);

// x is classically majorised by y.
bool classical_majorises(const RealVector& x, const RealVector& y, double tol = 1e-9);

// Equivalent characterisations, kept separately for cross-checks.
bool d_majorises_by_curve(const RealVector& x, const RealVector& y, const RealVector& d, int samples = 1000,
                          double tol = 1e-9);
bool d_majorises_by_elbows(const RealVector& x, const RealVector& y, const RealVector& d, double tol = 1e-9);

struct TransitionResult {
  bool feasible = false;
  RealMatrix matrix;  // d-stochastic A with A y = x when feasible
  std::optional<int> violated;
  bool conditioning_warning = false;
  double residual = 0;
};

// Searches for a d-stochastic matrix mapping y to x.
TransitionResult find_transition_matrix(const RealVector& d, const RealVector& y, const RealVector& x,
                                        double tol = 1e-9);

struct Halfspace {
  std::vector<int> mask;  // 0/1 indicator of the summed coordinates
  double bound;
};

// {x : 1^T x = 1^T y, m^T x <= th_y(m^T d) for all 0/1 masks m}
class MajPolytope {
 public:
  MajPolytope(const RealVector& d, const RealVector& y);

  int dim() const { return static_cast<int>(d_.size()); }
  double total() const { return total_; }
  const std::vector<Halfspace>& halfspaces() const { return hs_; }
  bool contains(const RealVector& x, double tol = 1e-9) const;
  // Smallest slack over the halfspaces; the total is not checked here.
  double min_slack(const RealVector& x) const;
  // Distinct extreme points, one per ordering of the coordinates.
  std::vector<RealVector> vertices(double dedup_tol = 1e-12) const;

 private:
  RealVector d_, y_;
  double total_;
  std::vector<Halfspace> hs_;
};

MajPolytope polytope(const RealVector& d, const RealVector& y);

// Extreme point associated with the ordering sigma (sigma[k] is the
// coordinate placed k-th).
RealVector extreme_point(const RealVector& d, const RealVector& y, const std::vector<int>& sigma);

// Extreme point for the ordering that sorts d decreasingly; it majorises
// every other extreme point classically.
RealVector max_corner(const RealVector& d, const RealVector& y);

void validate_triple(const RealVector& d, const RealVector& y, const RealVector* x = nullptr);

}  // namespace thermo::thermomaj
