#include "thermo/lp.hpp"

#include <algorithm>
#include <cmath>

namespace thermo::lp {

Problem::Problem(int num_vars) : n_(num_vars), c_(RealVector::Zero(num_vars)), free_(num_vars, 0) {
  if (num_vars < 1) throw InvalidInput("linear program needs at least one variable");
}

void Problem::set_free(int var) {
  if (var < 0 || var >= n_) throw InvalidInput("variable index out of range");
  free_[var] = 1;
}

void Problem::add(const RealVector& coeffs, Sense sense, double rhs) {
  if (coeffs.size() != n_) throw InvalidInput("constraint has wrong number of coefficients");
  if (!coeffs.allFinite() || !std::isfinite(rhs)) throw InvalidInput("constraint has non-finite data");
  rows_.push_back({coeffs, sense, rhs});
}

void Problem::set_objective(const RealVector& c) {
  if (c.size() != n_) throw InvalidInput("objective has wrong number of coefficients");
  if (!c.allFinite()) throw InvalidInput("objective has non-finite data");
  c_ = c;
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr int kMaxIterations = 200000;

struct Tableau {
  RealMatrix t;            // rows 0..m-1 constraints, row m objective; last column rhs
  std::vector<int> basis;  // basic column per constraint row
  int iterations = 0;

  int rows() const { return static_cast<int>(t.rows()) - 1; }
  int rhs_col() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int r, int c) {
    t.row(r) /= t(r, c);
    for (int i = 0; i < t.rows(); ++i) {
      if (i == r) continue;
      const double f = t(i, c);
      if (f != 0.0) t.row(i) -= f * t.row(r);
    }
    basis[r] = c;
    ++iterations;
  }

  // Runs Bland's rule over columns [0, ncols). Returns false if unbounded.
  bool optimise(int ncols, double tol) {
    const int m = rows();
    for (;;) {
      if (iterations > kMaxIterations) throw InternalError("simplex iteration limit reached");
      int enter = -1;
      for (int j = 0; j < ncols; ++j)
        if (t(m, j) < -tol) {
          enter = j;
          break;
        }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0;
      for (int i = 0; i < m; ++i) {
        if (t(i, enter) <= kPivotTol) continue;
        const double ratio = t(i, rhs_col()) / t(i, enter);
        if (leave < 0 || ratio < best - 1e-14 ||
            (std::abs(ratio - best) <= 1e-14 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

Solution solve(const Problem& problem, double tol) {
  const int n = problem.num_vars();
  const auto& rows = problem.constraints();
  const auto& free = problem.free_mask();
  const int m = static_cast<int>(rows.size());

  // Standard-form columns: split variables, then slacks.
  std::vector<int> pos_col(n), neg_col(n, -1);
  int ncol = 0;
  for (int j = 0; j < n; ++j) {
    pos_col[j] = ncol++;
    if (free[j]) neg_col[j] = ncol++;
  }
  std::vector<int> slack_col(m, -1);
  for (int i = 0; i < m; ++i)
    if (rows[i].sense != Sense::Equal) slack_col[i] = ncol++;
  const int nstruct = ncol;

  Solution sol;
  if (m == 0) {
    // Only the sign constraints: optimum at 0 unless some cost is negative.
    sol.x = RealVector::Zero(n);
    for (int j = 0; j < n; ++j)
      if (free[j] ? problem.objective()[j] != 0 : problem.objective()[j] < 0) {
        sol.status = Status::Unbounded;
        return sol;
      }
    sol.status = Status::Optimal;
    return sol;
  }

  double scale = 1.0;
  for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));

  Tableau tab;
  tab.t = RealMatrix::Zero(m + 1, nstruct + m + 1);
  tab.basis.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    const double sgn = rows[i].rhs < 0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tab.t(i, pos_col[j]) = sgn * rows[i].coeffs[j];
      if (neg_col[j] >= 0) tab.t(i, neg_col[j]) = -sgn * rows[i].coeffs[j];
    }
    if (slack_col[i] >= 0) tab.t(i, slack_col[i]) = sgn * (rows[i].sense == Sense::LessEq ? 1.0 : -1.0);
    tab.t(i, nstruct + i) = 1.0;
    tab.t(i, tab.rhs_col()) = sgn * rows[i].rhs;
    tab.basis[i] = nstruct + i;
  }
  // Phase one objective: sum of artificials, expressed in non-basic columns.
  for (int i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
  for (int i = 0; i < m; ++i) tab.t(m, nstruct + i) = 0;

  tab.optimise(nstruct, tol * 1e-3);
  if (-tab.t(m, tab.rhs_col()) > tol * scale) {
    sol.status = Status::Infeasible;
    sol.iterations = tab.iterations;
    return sol;
  }

  // Drive artificials out of the basis; rows where that is impossible are redundant.
  std::vector<char> keep(m, 1);
  for (int i = 0; i < m; ++i) {
    if (tab.basis[i] < nstruct) continue;
    int c = -1;
    for (int j = 0; j < nstruct; ++j)
      if (std::abs(tab.t(i, j)) > 1e-9) {
        c = j;
        break;
      }
    if (c >= 0)
      tab.pivot(i, c);
    else {
      keep[i] = 0;
      ++sol.redundant_rows;
    }
  }

  // Phase two on the structural columns.
  Tableau p2;
  int m2 = 0;
  for (int i = 0; i < m; ++i) m2 += keep[i];
  p2.t = RealMatrix::Zero(m2 + 1, nstruct + 1);
  p2.iterations = tab.iterations;
  for (int i = 0, r = 0; i < m; ++i) {
    if (!keep[i]) continue;
    p2.t.row(r).head(nstruct) = tab.t.row(i).head(nstruct);
    p2.t(r, nstruct) = tab.t(i, tab.rhs_col());
    p2.basis.push_back(tab.basis[i]);
    ++r;
  }
  RealVector cost = RealVector::Zero(nstruct);
  for (int j = 0; j < n; ++j) {
    cost[pos_col[j]] = problem.objective()[j];
    if (neg_col[j] >= 0) cost[neg_col[j]] = -problem.objective()[j];
  }
  p2.t.row(m2).head(nstruct) = cost.transpose();
  for (int r = 0; r < m2; ++r) {
    const double cb = cost[p2.basis[r]];
    if (cb != 0.0) p2.t.row(m2) -= cb * p2.t.row(r);
  }
  const bool bounded = p2.optimise(nstruct, tol * 1e-3);
  sol.iterations = p2.iterations;
  if (!bounded) {
    sol.status = Status::Unbounded;
    return sol;
  }

  RealVector z = RealVector::Zero(nstruct);
  for (int r = 0; r < m2; ++r) z[p2.basis[r]] = std::max(0.0, p2.t(r, nstruct));
  sol.x.resize(n);
  for (int j = 0; j < n; ++j) sol.x[j] = z[pos_col[j]] - (neg_col[j] >= 0 ? z[neg_col[j]] : 0.0);
  sol.objective = problem.objective().dot(sol.x);
  sol.status = Status::Optimal;

  double res = 0;
  for (const auto& r : rows) {
    const double lhs = r.coeffs.dot(sol.x);
    double v = 0;
    switch (r.sense) {
      case Sense::Equal: v = std::abs(lhs - r.rhs); break;
      case Sense::LessEq: v = std::max(0.0, lhs - r.rhs); break;
      case Sense::GreaterEq: v = std::max(0.0, r.rhs - lhs); break;
    }
    res = std::max(res, v);
  }
  sol.residual = res;
  return sol;
}

}  // namespace thermo::lp
