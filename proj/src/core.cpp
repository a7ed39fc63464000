#include "thermo/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

namespace thermo {

namespace {
std::atomic<double> g_geometric_tol{1e-6};
}

double geometric_tolerance() { return g_geometric_tol.load(); }

void set_geometric_tolerance(double tol) {
  if (!(tol > 0) || !std::isfinite(tol)) throw InvalidInput("tolerance must be positive and finite");
  g_geometric_tol.store(tol);
}

// ---------------------------------------------------------------------------
// Probability and Gibbs vectors

ProbVector::ProbVector(const RealVector& entries, double tol) {
  if (entries.size() == 0) throw InvalidInput("probability vector must be non-empty");
  require_finite(entries, "probability vector");
  RealVector p = entries;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < -tol) {
      std::ostringstream os;
      os << "probability vector entry " << i << " is negative (" << p[i] << ")";
      throw InvalidInput(os.str());
    }
    if (p[i] < 0) p[i] = 0;
  }
  double s = p.sum();
  if (std::abs(s - 1.0) > tol * std::max<double>(1.0, static_cast<double>(p.size()))) {
    std::ostringstream os;
    os << "probability vector sums to " << s;
    throw InvalidInput(os.str());
  }
  p_ = p / s;
}

ProbVector::ProbVector(std::initializer_list<double> entries)
    : ProbVector(Eigen::Map<const RealVector>(entries.begin(), static_cast<Eigen::Index>(entries.size()))) {}

ProbVector ProbVector::uniform(int n) {
  if (n < 1) throw InvalidInput("dimension must be positive");
  return ProbVector(RealVector::Constant(n, 1.0 / n));
}

ProbVector ProbVector::vertex(int n, int k) {
  if (k < 0 || k >= n) throw InvalidInput("vertex index out of range");
  RealVector e = RealVector::Zero(n);
  e[k] = 1;
  return ProbVector(e);
}

GibbsVector::GibbsVector(const RealVector& weights) {
  if (weights.size() == 0) throw InvalidInput("Gibbs vector must be non-empty");
  require_finite(weights, "Gibbs vector");
  if (weights.minCoeff() <= 0) throw InvalidInput("Gibbs vector must be strictly positive");
  d_ = weights / weights.sum();
}

GibbsVector GibbsVector::from_energies(const RealVector& energies, double temperature) {
  require_finite(energies, "energies");
  if (!(temperature > 0)) throw InvalidInput("temperature must be positive");
  RealVector w(energies.size());
  double e0 = energies.size() ? energies.minCoeff() : 0.0;
  for (Eigen::Index i = 0; i < energies.size(); ++i)
    w[i] = std::isinf(temperature) ? 1.0 : std::exp(-(energies[i] - e0) / temperature);
  GibbsVector g(w);
  g.energies_ = energies;
  g.temperature_ = temperature;
  return g;
}

// ---------------------------------------------------------------------------
// Permutations

Permutation identity_permutation(int n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

bool is_permutation(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  for (int v : p) {
    if (v < 0 || v >= static_cast<int>(p.size()) || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

Permutation inverse(const Permutation& p) {
  if (!is_permutation(p)) throw InvalidInput("not a permutation");
  Permutation q(p.size());
  for (size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
  return q;
}

Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw InvalidInput("permutation sizes differ");
  Permutation r(p.size());
  for (size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
  return r;
}

std::vector<Permutation> all_permutations(int n) {
  std::vector<Permutation> out;
  Permutation p = identity_permutation(n);
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

RealMatrix permutation_matrix(const Permutation& p) {
  if (!is_permutation(p)) throw InvalidInput("not a permutation");
  const int n = static_cast<int>(p.size());
  RealMatrix m = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(p[i], i) = 1;
  return m;
}

RealVector permute(const Permutation& p, const RealVector& x) {
  if (static_cast<Eigen::Index>(p.size()) != x.size()) throw InvalidInput("permutation size mismatch");
  RealVector y(x.size());
  for (size_t i = 0; i < p.size(); ++i) y[p[i]] = x[static_cast<Eigen::Index>(i)];
  return y;
}

std::vector<int> argsort_descending(const RealVector& x) {
  std::vector<int> idx(static_cast<size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) { return x[i] > x[j]; });
  return idx;
}

RealVector sorted_descending(const RealVector& x) {
  RealVector y = x;
  std::sort(y.data(), y.data() + y.size(), std::greater<double>());
  return y;
}

// ---------------------------------------------------------------------------
// Matrix predicates

bool is_column_stochastic(const RealMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.minCoeff() < -tol) return false;
  return ((a.colwise().sum().array() - 1.0).abs() <= tol).all();
}

bool is_d_stochastic(const RealMatrix& a, const RealVector& d, double tol) {
  if (!is_column_stochastic(a, tol) || a.cols() != d.size()) return false;
  return (a * d - d).cwiseAbs().maxCoeff() <= tol;
}

bool is_permutation_matrix(const RealMatrix& a, double tol) {
  if (!is_column_stochastic(a, tol)) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (std::abs(a(i, j)) > tol && std::abs(a(i, j) - 1) > tol) return false;
  return ((a.rowwise().sum().array() - 1.0).abs() <= tol).all();
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

bool is_unitary(const ComplexMatrix& a, double tol) {
  return a.rows() == a.cols() && max_abs(a * a.adjoint() - ComplexMatrix::Identity(a.rows(), a.cols())) <= tol;
}

void require_finite(const RealVector& v, const char* what) {
  if (!v.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
}

void require_finite(const ComplexMatrix& m, const char* what) {
  if (!m.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidInput(std::string(what) + " must be square and non-empty");
}

double max_abs(const ComplexMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

// ---------------------------------------------------------------------------
// Vectorisation and superoperators

ComplexVector stack(const ComplexMatrix& x) {
  return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix unstack(const ComplexVector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) throw InvalidInput("vector length is not a perfect square");
  return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

Superoperator::Superoperator(ComplexMatrix matrix) : m_(std::move(matrix)) {
  require_square(m_, "superoperator matrix");
  const auto n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(m_.rows()))));
  if (static_cast<Eigen::Index>(n) * n != m_.rows()) throw InvalidInput("superoperator size is not a perfect square");
  dim_ = n;
}

Superoperator Superoperator::identity(int n) { return Superoperator(ComplexMatrix::Identity(n * n, n * n)); }
Superoperator Superoperator::zero(int n) { return Superoperator(ComplexMatrix::Zero(n * n, n * n)); }

Superoperator Superoperator::sandwich(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "left factor");
  require_square(b, "right factor");
  // vec(A X B) = (B^T (x) A) vec(X)
  return Superoperator(kron(b.transpose(), a));
}

Superoperator Superoperator::conjugation(const ComplexMatrix& u) { return sandwich(u, u.adjoint()); }

Superoperator Superoperator::commutator_with(const ComplexMatrix& h) {
  require_square(h, "Hamiltonian");
  const auto n = h.rows();
  ComplexMatrix id = ComplexMatrix::Identity(n, n);
  return Superoperator(kron(id, h) - kron(h.transpose(), id));
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) throw InvalidInput("operand dimension mismatch");
  return unstack(m_ * stack(x));
}

Superoperator Superoperator::operator*(const Superoperator& rhs) const {
  if (dim_ != rhs.dim_) throw InvalidInput("superoperator dimension mismatch");
  return Superoperator(m_ * rhs.m_);
}

Superoperator Superoperator::operator+(const Superoperator& rhs) const {
  if (dim_ != rhs.dim_) throw InvalidInput("superoperator dimension mismatch");
  return Superoperator(m_ + rhs.m_);
}

Superoperator Superoperator::operator-(const Superoperator& rhs) const {
  if (dim_ != rhs.dim_) throw InvalidInput("superoperator dimension mismatch");
  return Superoperator(m_ - rhs.m_);
}

Superoperator Superoperator::operator*(Complex s) const { return Superoperator(m_ * s); }

ComplexMatrix Superoperator::choi() const {
  const int n = dim_;
  ComplexMatrix c = ComplexMatrix::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(n, n);
      e(i, j) = 1;
      c.block(i * n, j * n, n, n) = apply(e) / static_cast<double>(n);
    }
  return c;
}

bool Superoperator::is_trace_preserving(double tol) const {
  // tr(L(X)) = tr(X) for all X  <=>  vec(1)^T L = vec(1)^T
  ComplexVector one = stack(ComplexMatrix::Identity(dim_, dim_));
  return (one.transpose() * m_ - one.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool Superoperator::is_trace_annihilating(double tol) const {
  ComplexVector one = stack(ComplexMatrix::Identity(dim_, dim_));
  return (one.transpose() * m_).cwiseAbs().maxCoeff() <= tol;
}

bool Superoperator::is_hermiticity_preserving(double tol) const {
  // L(X^dagger) = L(X)^dagger on the matrix units
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(dim_, dim_);
      e(i, j) = 1;
      if (max_abs(apply(e.adjoint()) - apply(e).adjoint()) > tol) return false;
    }
  return true;
}

Superoperator ad(const ComplexMatrix& h) { return Superoperator::commutator_with(h); }
Superoperator Ad(const ComplexMatrix& u) { return Superoperator::conjugation(u); }

ComplexMatrix partial_trace_wrt(const ComplexMatrix& x, const ComplexMatrix& b) {
  require_square(x, "bath operator");
  require_square(b, "bipartite operator");
  const Eigen::Index m = x.rows();
  if (b.rows() % m != 0) throw InvalidInput("bipartite operator dimension is not a multiple of the bath dimension");
  const Eigen::Index n = b.rows() / m;
  // tr_X(B)(j, i) = sum_{a,b} X(a, b) B(j*m + b, i*m + a)
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex s = 0;
      for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index bb = 0; bb < m; ++bb) {
          if (x(a, bb) == Complex(0)) continue;
          s += x(a, bb) * b(j * m + bb, i * m + a);
        }
      r(j, i) = s;
    }
  return r;
}

}  // namespace thermo
