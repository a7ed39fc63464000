#include "thermo/gksl.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

namespace thermo::gksl {

namespace {

const Complex kI(0, 1);

ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b) { return a * b.adjoint(); }

void require_hermitian(const ComplexMatrix& h, const char* what) {
  require_square(h, what);
  require_finite(h, what);
  if (!is_hermitian(h, 1e-9 * std::max(1.0, max_abs(h)))) throw InvalidInput(std::string(what) + " is not Hermitian");
}

}  // namespace

Superoperator dissipator(const std::vector<ComplexMatrix>& ops) {
  if (ops.empty()) throw InvalidInput("dissipator needs at least one operator");
  const auto n = ops.front().rows();
  ComplexMatrix id = ComplexMatrix::Identity(n, n);
  ComplexMatrix g = ComplexMatrix::Zero(n * n, n * n);
  for (const auto& v : ops) {
    require_square(v, "Lindblad operator");
    if (v.rows() != n) throw InvalidInput("Lindblad operators have different dimensions");
    const ComplexMatrix vv = v.adjoint() * v;
    // vec(A X) = (1 (x) A) vec X, vec(X A) = (A^T (x) 1) vec X, vec(V X V^dag) = (conj V (x) V) vec X
    g += 0.5 * (kron(id, vv) + kron(vv.transpose(), id)) - kron(v.conjugate(), v);
  }
  return Superoperator(g);
}

GKSLGenerator::GKSLGenerator(ComplexMatrix hamiltonian, std::vector<ComplexMatrix> lindblad_ops)
    : h_(std::move(hamiltonian)), ops_(std::move(lindblad_ops)) {
  require_hermitian(h_, "Hamiltonian");
  if (!ops_.empty() && ops_.front().rows() != h_.rows())
    throw InvalidInput("Lindblad operators and Hamiltonian differ in dimension");
  Superoperator l = ad(h_) * (-kI);
  if (!ops_.empty()) l = l - dissipator(ops_);
  l_ = l;
}

ThermalSetup::ThermalSetup(const RealVector& h0_diag, double temperature) : e_(h0_diag), t_(temperature) {
  if (h0_diag.size() == 0) throw InvalidInput("H0 must be non-empty");
  require_finite(h0_diag, "H0");
  if (!(temperature > 0)) throw InvalidInput("temperature must be positive or infinite");
  d_ = GibbsVector::from_energies(h0_diag, temperature);
}

ComplexMatrix ThermalSetup::h0() const { return e_.cast<Complex>().asDiagonal(); }

ComplexMatrix ThermalSetup::gibbs_state() const { return d_.entries().cast<Complex>().asDiagonal(); }

RealVector thermal_angles(const GibbsVector& d) {
  const int n = d.size();
  if (n < 2) throw InvalidInput("need at least two levels");
  RealVector th(n - 1);
  for (int k = 0; k + 1 < n; ++k) th[k] = std::acos(1.0 / std::sqrt(1.0 + d[k + 1] / d[k]));
  return th;
}

LadderOps ladder_ops(const GibbsVector& d, int n) {
  if (n < 2) throw InvalidInput("ladder operators need n >= 2");
  if (d.size() != n) throw InvalidInput("Gibbs vector length differs from n");
  const RealVector th = thermal_angles(d);
  LadderOps ops{ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
  for (int k = 1; k < n; ++k) {
    const double w = std::sqrt(static_cast<double>(k) * (n - k));
    ops.raise(k - 1, k) = w * std::cos(th[k - 1]);
    ops.lower(k, k - 1) = w * std::sin(th[k - 1]);
  }
  return ops;
}

Superoperator ladder_dissipator(const GibbsVector& d) {
  LadderOps ops = ladder_ops(d, d.size());
  return dissipator({ops.raise, ops.lower});
}

namespace {

Eigensystem density_eigensystem(const ComplexMatrix& omega) {
  require_hermitian(omega, "bath state");
  Eigensystem es = hermitian_eigensystem(omega);
  if (es.values.minCoeff() < -1e-9) throw InvalidInput("bath state is not positive semidefinite");
  if (std::abs(omega.trace().real() - 1.0) > 1e-9) throw InvalidInput("bath state does not have unit trace");
  return es;
}

}  // namespace

TaylorTerms stinespring_taylor(const ComplexMatrix& h, const ComplexMatrix& omega) {
  require_hermitian(h, "total Hamiltonian");
  const Eigensystem es = density_eigensystem(omega);
  const auto m = omega.rows();
  if (h.rows() % m != 0) throw InvalidInput("total Hamiltonian dimension is not a multiple of the bath dimension");
  const ComplexMatrix reduced = partial_trace_wrt(omega, h);
  TaylorTerms t{ad(reduced) * (-kI), Superoperator::zero(static_cast<int>(h.rows() / m))};
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double r = std::max(0.0, es.values[k]);
    if (r == 0.0) continue;
    for (Eigen::Index j = 0; j < m; ++j)
      ops.push_back(std::sqrt(2 * r) * partial_trace_wrt(outer(es.vectors.col(k), es.vectors.col(j)), h));
  }
  if (!ops.empty()) t.order2 = dissipator(ops) * Complex(-1);
  return t;
}

Superoperator stinespring_channel(const ComplexMatrix& h, const ComplexMatrix& omega, double t) {
  require_hermitian(h, "total Hamiltonian");
  density_eigensystem(omega);
  const auto m = omega.rows();
  const auto n = h.rows() / m;
  const ComplexMatrix u = expm(ComplexMatrix(h * (-kI * t)));
  const ComplexMatrix idm = ComplexMatrix::Identity(m, m);
  ComplexMatrix s(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      ComplexMatrix e = ComplexMatrix::Zero(n, n);
      e(i, j) = 1;
      const ComplexMatrix out = partial_trace_wrt(idm, u * kron(e, omega) * u.adjoint());
      s.col(i + n * j) = stack(out);
    }
  return Superoperator(s);
}

Eigensystem hermitian_eigensystem(const ComplexMatrix& h) {
  require_square(h, "matrix");
  const auto n = h.rows();
  Eigensystem es;
  bool diagonal = true;
  for (Eigen::Index i = 0; i < n && diagonal; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && h(i, j) != Complex(0)) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    std::vector<int> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return h(a, a).real() < h(b, b).real(); });
    es.values.resize(n);
    es.vectors = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      es.values[k] = h(idx[k], idx[k]).real();
      es.vectors(idx[k], k) = 1;
    }
    return es;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (h + h.adjoint()));
  es.values = solver.eigenvalues();
  es.vectors = solver.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index big = 0;
    es.vectors.col(k).cwiseAbs().maxCoeff(&big);
    const Complex z = es.vectors(big, k);
    es.vectors.col(k) *= std::conj(z) / std::abs(z);
  }
  return es;
}

MarkovGenerator markov_to_generator(const ComplexMatrix& h_tot, const ComplexMatrix& h_bath, const ComplexMatrix& h,
                                    const ThermalSetup& setup, double tol) {
  require_hermitian(h_tot, "total Hamiltonian");
  require_hermitian(h_bath, "bath Hamiltonian");
  require_hermitian(h, "system Hamiltonian");
  const auto n = setup.dim();
  const auto m = h_bath.rows();
  if (h.rows() != n) throw InvalidInput("system Hamiltonian dimension differs from H0");
  if (h_tot.rows() != n * m) throw InvalidInput("total Hamiltonian must have dimension n*m");

  const ComplexMatrix h0 = setup.h0();
  const ComplexMatrix free = kron(h0, ComplexMatrix::Identity(m, m)) + kron(ComplexMatrix::Identity(n, n), h_bath);
  const double c1 = max_abs(commutator(h_tot, free));
  if (c1 > tol * std::max(1.0, max_abs(h_tot) * max_abs(free))) {
    std::ostringstream os;
    os << "total Hamiltonian does not commute with H0 (x) 1 + 1 (x) H_B (commutator norm " << c1 << ")";
    throw InvalidInput(os.str());
  }
  const double c2 = max_abs(commutator(h, h0));
  if (c2 > tol * std::max(1.0, max_abs(h) * max_abs(h0))) {
    std::ostringstream os;
    os << "system Hamiltonian does not commute with H0 (commutator norm " << c2 << ")";
    throw InvalidInput(os.str());
  }

  Eigensystem bath = hermitian_eigensystem(h_bath);
  const double e0 = bath.values[0];
  const double temp = setup.temperature();
  std::vector<LindbladTerm> terms;
  std::vector<ComplexMatrix> ops;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double w = std::isinf(temp) ? 1.0 : std::exp(-(bath.values[j] - e0) / (2 * temp));
    for (Eigen::Index k = 0; k < m; ++k) {
      ComplexMatrix v = w * partial_trace_wrt(outer(bath.vectors.col(j), bath.vectors.col(k)), h_tot);
      terms.push_back({static_cast<int>(j), static_cast<int>(k), v});
      ops.push_back(std::move(v));
    }
  }
  return MarkovGenerator{GKSLGenerator(h, ops), std::move(terms), std::move(bath)};
}

ComplexMatrix ladder_htot(int n, double spacing, double temperature) {
  if (n < 2) throw InvalidInput("ladder coupling needs n >= 2");
  if (!(spacing > 0) || !std::isfinite(spacing)) throw InvalidInput("energy spacing must be positive");
  if (!(temperature > 0)) throw InvalidInput("temperature must be positive");
  const double boltz = std::isinf(temperature) ? 1.0 : std::exp(-spacing / temperature);
  ComplexMatrix ht = ComplexMatrix::Zero(2 * n, 2 * n);
  for (int j = 1; j < n; ++j) {
    const double c = std::sqrt(static_cast<double>(j) * (n - j) / (1 + boltz));
    // |e_j><e_{j+1}| (x) |e_2><e_1|
    const int row = (j - 1) * 2 + 1, col = j * 2;
    ht(row, col) = c;
    ht(col, row) = c;
  }
  return ht;
}

LadderCoupling ladder_coupling(int n, double spacing, double temperature) {
  RealVector levels(n);
  for (int k = 0; k < n; ++k) levels[k] = k * spacing;
  ComplexMatrix hb = ComplexMatrix::Zero(2, 2);
  hb(1, 1) = spacing;
  return LadderCoupling{ladder_htot(n, spacing, temperature), hb, ThermalSetup(levels, temperature)};
}

double cond_cp_min_eigenvalue(const Superoperator& l) {
  if (!l.is_hermiticity_preserving(1e-9 * std::max(1.0, max_abs(l.matrix()))))
    throw InvalidInput("generator does not preserve Hermiticity");
  const int n = l.dim();
  const ComplexMatrix c = l.choi();
  ComplexVector omega = ComplexVector::Zero(n * n);
  for (int i = 0; i < n; ++i) omega[i * n + i] = 1.0 / std::sqrt(static_cast<double>(n));
  const ComplexMatrix q = ComplexMatrix::Identity(n * n, n * n) - omega * omega.adjoint();
  ComplexMatrix comp = q * c * q;
  comp = 0.5 * (comp + comp.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(comp, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool cond_cp(const Superoperator& l) {
  const double floor = -1e-9 * std::max(l.choi().norm(), 1e-5);
  return cond_cp_min_eigenvalue(l) >= floor;
}

EntoReport is_ento_generator(const Superoperator& l, const ThermalSetup& setup, double tol) {
  if (l.dim() != setup.dim()) throw InvalidInput("generator and H0 differ in dimension");
  EntoReport r;
  const double scale = std::max(1.0, max_abs(l.matrix()));
  r.hermiticity_preserving = l.is_hermiticity_preserving(tol * scale);
  r.trace_annihilating = l.is_trace_annihilating(tol * scale);
  if (r.hermiticity_preserving) {
    r.ccp_min_eigenvalue = cond_cp_min_eigenvalue(l);
    r.conditionally_cp = r.ccp_min_eigenvalue >= -1e-9 * std::max(l.choi().norm(), 1e-5);
  }
  r.gibbs_residual = max_abs(l.apply(setup.gibbs_state()));
  r.gibbs_fixed = r.gibbs_residual <= tol * scale;
  const Superoperator a = ad(setup.h0());
  r.commutator_norm = max_abs((l * a - a * l).matrix());
  r.covariant = r.commutator_norm <= tol * scale * std::max(1.0, max_abs(a.matrix()));
  return r;
}

bool is_edge_generator(const ComplexMatrix& h, const ThermalSetup& setup, double tol) {
  require_square(h, "Hamiltonian");
  if (h.rows() != setup.dim()) throw InvalidInput("Hamiltonian and H0 differ in dimension");
  return max_abs(commutator(h, setup.h0())) < tol * std::max(1.0, max_abs(h));
}

// ---------------------------------------------------------------------------
// Converse search

namespace {

// Real parametrisation of Hermitian matrices commuting with a diagonal matrix.
class CommutantBasis {
 public:
  CommutantBasis(const RealVector& diag, double tol) : n_(diag.size()) {
    for (Eigen::Index i = 0; i < n_; ++i) {
      entries_.push_back({i, i, false});
      for (Eigen::Index j = i + 1; j < n_; ++j)
        if (std::abs(diag[i] - diag[j]) <= tol) {
          entries_.push_back({i, j, false});
          entries_.push_back({i, j, true});
        }
    }
  }
  int size() const { return static_cast<int>(entries_.size()); }
  ComplexMatrix build(const double* p) const {
    ComplexMatrix h = ComplexMatrix::Zero(n_, n_);
    for (size_t k = 0; k < entries_.size(); ++k) {
      const auto& e = entries_[k];
      const Complex z = e.imag ? Complex(0, p[k]) : Complex(p[k], 0);
      h(e.i, e.j) += z;
      if (e.i != e.j) h(e.j, e.i) += std::conj(z);
    }
    return h;
  }

 private:
  struct Entry {
    Eigen::Index i, j;
    bool imag;
  };
  Eigen::Index n_;
  std::vector<Entry> entries_;
};

RealVector nelder_mead(const std::function<double(const RealVector&)>& f, RealVector x0, double step, int max_evals,
                       double* best) {
  const auto n = x0.size();
  std::vector<RealVector> s(static_cast<size_t>(n + 1), x0);
  std::vector<double> fv(static_cast<size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) s[static_cast<size_t>(i + 1)][i] += step;
  int evals = 0;
  for (size_t i = 0; i < s.size(); ++i, ++evals) fv[i] = f(s[i]);
  std::vector<size_t> idx(s.size());
  while (evals < max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
    if (fv[idx.back()] - fv[idx.front()] < 1e-14) break;
    RealVector c = RealVector::Zero(n);
    for (size_t k = 0; k + 1 < idx.size(); ++k) c += s[idx[k]];
    c /= static_cast<double>(n);
    const size_t w = idx.back();
    RealVector xr = c + (c - s[w]);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[idx.front()]) {
      RealVector xe = c + 2 * (c - s[w]);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) s[w] = xe, fv[w] = fe;
      else s[w] = xr, fv[w] = fr;
    } else if (fr < fv[idx[idx.size() - 2]]) {
      s[w] = xr, fv[w] = fr;
    } else {
      RealVector xc = c + 0.5 * (s[w] - c);
      const double fc = f(xc);
      ++evals;
      if (fc < fv[w]) s[w] = xc, fv[w] = fc;
      else {
        const RealVector b = s[idx.front()];
        for (size_t k = 1; k < idx.size(); ++k) {
          s[idx[k]] = b + 0.5 * (s[idx[k]] - b);
          fv[idx[k]] = f(s[idx[k]]);
          ++evals;
        }
      }
    }
  }
  size_t bi = static_cast<size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  *best = fv[bi];
  return s[bi];
}

}  // namespace

SearchReport converse_search(const ThermalSetup& setup, int samples, std::uint64_t seed, int restarts,
                             int max_evals) {
  const int n = setup.dim();
  if (n > 4) throw InvalidInput("converse search limited to n <= 4");
  const RealVector& e = setup.energies();
  RealVector joint(n * n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) joint[i * n + a] = e[i] + e[a];
  const double etol = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
  const CommutantBasis tot_basis(joint, etol), sys_basis(e, etol);
  const ComplexMatrix hb = setup.h0();
  const int ptot = tot_basis.size(), psys = sys_basis.size();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto generator_of = [&](const RealVector& p) {
    return markov_to_generator(tot_basis.build(p.data()), hb, sys_basis.build(p.data() + ptot), setup, 1e-8)
        .generator.superop();
  };

  SearchReport rep;
  for (int s = 0; s < samples; ++s) {
    // Two independent dilation generators summed: admissible, not obviously dilatable with one bath copy.
    RealVector p1(ptot + psys), p2(ptot + psys);
    for (Eigen::Index k = 0; k < p1.size(); ++k) p1[k] = gauss(rng), p2[k] = gauss(rng);
    const ComplexMatrix target = generator_of(p1).matrix() + generator_of(p2).matrix();
    const double tn = target.norm();
    auto cost = [&](const RealVector& p) { return (generator_of(p).matrix() - target).norm() / tn; };
    double best = kInf;
    for (int r = 0; r < restarts; ++r) {
      RealVector x0(ptot + psys);
      for (Eigen::Index k = 0; k < x0.size(); ++k) x0[k] = gauss(rng);
      double fb = 0;
      nelder_mead(cost, x0, 0.5, max_evals, &fb);
      best = std::min(best, fb);
    }
    rep.samples.push_back({tn, best});
    rep.worst_residual = std::max(rep.worst_residual, best);
  }
  return rep;
}

}  // namespace thermo::gksl
