#pragma once

#include "thermo/core.hpp"

#include <vector>

namespace thermo::lp {

enum class Sense { LessEq, Equal, GreaterEq };
enum class Status { Optimal, Infeasible, Unbounded };

struct Constraint {
  RealVector coeffs;
  Sense sense;
  double rhs;
};

// Dense linear program: minimise c^T x subject to row constraints, with
// x >= 0 unless a variable is marked free.
class Problem {
 public:
  explicit Problem(int num_vars);

  int num_vars() const { return n_; }
  void set_free(int var);
  void add(const RealVector& coeffs, Sense sense, double rhs);
  void set_objective(const RealVector& c);

  const std::vector<Constraint>& constraints() const { return rows_; }
  const RealVector& objective() const { return c_; }
  const std::vector<char>& free_mask() const { return free_; }

 private:
  int n_;
  RealVector c_;
  std::vector<char> free_;
  std::vector<Constraint> rows_;
};

struct Solution {
  Status status = Status::Infeasible;
  RealVector x;
  double objective = 0;
  int iterations = 0;
  // Largest violation of the original constraints at x.
  double residual = 0;
  // Number of equality rows found linearly dependent in phase one.
  int redundant_rows = 0;
};

// Two-phase tableau simplex with Bland's anti-cycling rule.
Solution solve(const Problem& problem, double tol = 1e-9);

}  // namespace thermo::lp
