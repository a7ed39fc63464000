#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace thermo {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Malformed input: wrong dimensions, non-finite entries, violated preconditions.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Well-formed input whose answer is "no", or an operation undefined at a point.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A postcondition the code itself should guarantee did not hold.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Tolerances {
  double algebraic = 1e-9;
  double geometric = 1e-6;
};

// Default geometric tolerance; the CLI may override it.
double geometric_tolerance();
void set_geometric_tolerance(double tol);

// A probability vector. Entries in [-tol, 0) are clamped to zero and the
// result renormalised.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(const RealVector& entries, double tol = 1e-9);
  ProbVector(std::initializer_list<double> entries);

  static ProbVector uniform(int n);
  static ProbVector vertex(int n, int k);

  const RealVector& entries() const { return p_; }
  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[i]; }
  operator const RealVector&() const { return p_; }

 private:
  RealVector p_;
};

// Strictly positive probability vector, optionally with the energies and
// temperature it came from.
class GibbsVector {
 public:
  GibbsVector() = default;
  explicit GibbsVector(const RealVector& weights);
  static GibbsVector from_energies(const RealVector& energies, double temperature);

  const RealVector& entries() const { return d_; }
  int size() const { return static_cast<int>(d_.size()); }
  double operator[](int i) const { return d_[i]; }
  operator const RealVector&() const { return d_; }
  ProbVector prob() const { return ProbVector(d_); }

  bool has_energies() const { return energies_.size() > 0; }
  const RealVector& energies() const { return energies_; }
  double temperature() const { return temperature_; }

 private:
  RealVector d_;
  RealVector energies_;
  double temperature_ = kInf;
};

// Permutation as a 0-indexed image list: i -> image[i].
using Permutation = std::vector<int>;

Permutation identity_permutation(int n);
bool is_permutation(const Permutation& p);
Permutation inverse(const Permutation& p);
// (p * q)(i) = p(q(i))
Permutation compose(const Permutation& p, const Permutation& q);
std::vector<Permutation> all_permutations(int n);
// Matrix with P e_i = e_{p(i)}.
RealMatrix permutation_matrix(const Permutation& p);
// (p x)_{p(i)} = x_i
RealVector permute(const Permutation& p, const RealVector& x);
// Indices ordering x decreasingly; stable in the index.
std::vector<int> argsort_descending(const RealVector& x);
RealVector sorted_descending(const RealVector& x);

enum class MatrixKind { ColumnStochastic, DStochastic, Permutation, Hermitian, Unitary };

bool is_column_stochastic(const RealMatrix& a, double tol = 1e-9);
bool is_d_stochastic(const RealMatrix& a, const RealVector& d, double tol = 1e-9);
bool is_permutation_matrix(const RealMatrix& a, double tol = 1e-12);
bool is_hermitian(const ComplexMatrix& a, double tol = 1e-9);
bool is_unitary(const ComplexMatrix& a, double tol = 1e-9);

void require_finite(const RealVector& v, const char* what);
void require_finite(const ComplexMatrix& m, const char* what);
void require_square(const ComplexMatrix& m, const char* what);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Column-stacking vectorisation: vec(X)[i + n*j] = X(i, j).
ComplexVector stack(const ComplexMatrix& x);
ComplexMatrix unstack(const ComplexVector& v);

// Linear map on n x n matrices, stored as an n^2 x n^2 matrix acting on stack(X).
class Superoperator {
 public:
  Superoperator() = default;
  explicit Superoperator(ComplexMatrix matrix);

  static Superoperator identity(int n);
  static Superoperator zero(int n);
  // X -> A X B
  static Superoperator sandwich(const ComplexMatrix& a, const ComplexMatrix& b);
  // X -> U X U^dagger
  static Superoperator conjugation(const ComplexMatrix& u);
  // X -> [H, X]
  static Superoperator commutator_with(const ComplexMatrix& h);

  int dim() const { return dim_; }
  const ComplexMatrix& matrix() const { return m_; }
  ComplexMatrix apply(const ComplexMatrix& x) const;

  Superoperator operator*(const Superoperator& rhs) const;
  Superoperator operator+(const Superoperator& rhs) const;
  Superoperator operator-(const Superoperator& rhs) const;
  Superoperator operator*(Complex s) const;

  // (id (x) L)(|Omega><Omega|), |Omega> = sum_i |ii> / sqrt(n).
  ComplexMatrix choi() const;

  bool is_trace_preserving(double tol = 1e-9) const;
  bool is_trace_annihilating(double tol = 1e-9) const;
  bool is_hermiticity_preserving(double tol = 1e-9) const;

 private:
  ComplexMatrix m_;
  int dim_ = 0;
};

// ad_H = [H, .]
Superoperator ad(const ComplexMatrix& h);
// Ad_U = U . U^dagger
Superoperator Ad(const ComplexMatrix& u);

// Partial trace of B in C^{n x n} (x) C^{m x m} against the bath operator X,
// characterised by tr(A tr_X(B)) = tr((A (x) X) B) for every A.
ComplexMatrix partial_trace_wrt(const ComplexMatrix& x, const ComplexMatrix& b);

// Matrix exponential. Hermitian and anti-Hermitian inputs take an
// eigendecomposition path, everything else scaling-and-squaring with a
// degree 13 Pade approximant.
ComplexMatrix expm(const ComplexMatrix& a);
RealMatrix expm(const RealMatrix& a);
Superoperator expm(const Superoperator& l);

double max_abs(const ComplexMatrix& m);

}  // namespace thermo
