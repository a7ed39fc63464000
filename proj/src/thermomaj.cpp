#include "thermo/thermomaj.hpp"

#include "thermo/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace thermo::thermomaj {

void validate_triple(const RealVector& d, const RealVector& y, const RealVector* x) {
  if (d.size() == 0) throw InvalidInput("d must be non-empty");
  require_finite(d, "d");
  require_finite(y, "y");
  if (d.minCoeff() <= 0) throw InvalidInput("d must be strictly positive");
  if (y.size() != d.size()) throw InvalidInput("y and d have different lengths");
  if (x) {
    require_finite(*x, "x");
    if (x->size() != d.size()) throw InvalidInput("x and d have different lengths");
  }
}

ThermoCurve::ThermoCurve(const RealVector& d, const RealVector& y) {
  validate_triple(d, y);
  const auto n = d.size();
  order_.resize(static_cast<size_t>(n));
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](int i, int j) { return y[i] * d[j] > y[j] * d[i]; });
  xs_ = RealVector::Zero(n + 1);
  ys_ = RealVector::Zero(n + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    xs_[k + 1] = xs_[k] + d[order_[k]];
    ys_[k + 1] = ys_[k] + y[order_[k]];
  }
}

double ThermoCurve::operator()(double c) const {
  const double end = xs_[xs_.size() - 1];
  if (!std::isfinite(c) || c < -1e-12 * end || c > end * (1 + 1e-12)) {
    std::ostringstream os;
    os << "curve argument " << c << " outside [0, " << end << "]";
    throw DomainError(os.str());
  }
  c = std::clamp(c, 0.0, end);
  if (c == end) return ys_[ys_.size() - 1];
  auto k = static_cast<Eigen::Index>(std::upper_bound(xs_.data(), xs_.data() + xs_.size(), c) - xs_.data()) - 1;
  k = std::clamp<Eigen::Index>(k, 0, xs_.size() - 2);
  const double w = (c - xs_[k]) / (xs_[k + 1] - xs_[k]);
  return ys_[k] + w * (ys_[k + 1] - ys_[k]);
}

double ThermoCurve::slope(int segment) const {
  if (segment < 0 || segment >= static_cast<int>(order_.size())) throw InvalidInput("segment out of range");
  return (ys_[segment + 1] - ys_[segment]) / (xs_[segment + 1] - xs_[segment]);
}

std::vector<std::pair<double, double>> ThermoCurve::sample(int count) const {
  if (count < 2) throw InvalidInput("need at least two samples");
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<size_t>(count));
  const double end = xs_[xs_.size() - 1];
  for (int k = 0; k < count; ++k) {
    const double c = (k == count - 1) ? end : end * k / (count - 1);
    out.emplace_back(c, (*this)(c));
  }
  return out;
}

ThermoCurve thermo_curve(const RealVector& d, const RealVector& y) { return ThermoCurve(d, y); }

namespace {

// ||d_i v - y_i d||_1, the 1-norm distance at the breakpoint y_i / d_i of y.
double one_norm_spread(const RealVector& v, const RealVector& y, const RealVector& d, Eigen::Index i) {
  return (d[i] * v - y[i] * d).cwiseAbs().sum();
}

double scale_of(const RealVector& y) { return std::max(1.0, y.cwiseAbs().sum()); }

}  // namespace

MajorisationCheck d_majorises(const RealVector& x, const RealVector& y, const RealVector& d, double tol) {
  validate_triple(d, y, &x);
  const double s = scale_of(y);
  MajorisationCheck r;
  r.worst_margin = -kInf;
  bool ok = std::abs(x.sum() - y.sum()) <= tol * s;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double margin = one_norm_spread(x, y, d, i) - one_norm_spread(y, y, d, i);
    r.worst_margin = std::max(r.worst_margin, margin);
    if (margin > tol * s && !r.violated) r.violated = static_cast<int>(i);
  }
  r.holds = ok && !r.violated;
  return r;
}

bool classical_majorises(const RealVector& x, const RealVector& y, double tol) {
  if (x.size() != y.size() || x.size() == 0) throw InvalidInput("vectors must be non-empty and of equal length");
  require_finite(x, "x");
  require_finite(y, "y");
  const double s = scale_of(y);
  if (std::abs(x.sum() - y.sum()) > tol * s) return false;
  RealVector xs = sorted_descending(x), ys = sorted_descending(y);
  double px = 0, py = 0;
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k) {
    px += xs[k];
    py += ys[k];
    if (px > py + tol * s) return false;
  }
  return true;
}

bool d_majorises_by_curve(const RealVector& x, const RealVector& y, const RealVector& d, int samples,
                          double tol) {
  validate_triple(d, y, &x);
  const double s = scale_of(y);
  if (std::abs(x.sum() - y.sum()) > tol * s) return false;
  ThermoCurve cx(d, x), cy(d, y);
  const double end = d.sum();
  for (int k = 0; k < samples; ++k) {
    const double c = (k == samples - 1) ? end : end * k / (samples - 1);
    if (cx(c) > cy(c) + tol * s) return false;
  }
  return true;
}

bool d_majorises_by_elbows(const RealVector& x, const RealVector& y, const RealVector& d, double tol) {
  validate_triple(d, y, &x);
  const double s = scale_of(y);
  if (std::abs(x.sum() - y.sum()) > tol * s) return false;
  ThermoCurve cx(d, x), cy(d, y);
  for (Eigen::Index k = 0; k < cx.abscissas().size(); ++k)
    if (cx.ordinates()[k] > cy(cx.abscissas()[k]) + tol * s) return false;
  return true;
}

TransitionResult find_transition_matrix(const RealVector& d, const RealVector& y, const RealVector& x, double tol) {
  validate_triple(d, y, &x);
  const int n = static_cast<int>(d.size());
  TransitionResult out;
  auto var = [n](int i, int j) { return i * n + j; };
  lp::Problem prob(n * n);
  for (int j = 0; j < n; ++j) {
    RealVector row = RealVector::Zero(n * n);
    for (int i = 0; i < n; ++i) row[var(i, j)] = 1;
    prob.add(row, lp::Sense::Equal, 1.0);
  }
  for (int i = 0; i < n; ++i) {
    RealVector rd = RealVector::Zero(n * n), ry = RealVector::Zero(n * n);
    for (int j = 0; j < n; ++j) {
      rd[var(i, j)] = d[j];
      ry[var(i, j)] = y[j];
    }
    prob.add(rd, lp::Sense::Equal, d[i]);
    prob.add(ry, lp::Sense::Equal, x[i]);
  }
  const lp::Solution sol = lp::solve(prob, tol);
  if (sol.status != lp::Status::Optimal) {
    MajorisationCheck chk = d_majorises(x, y, d, tol);
    if (chk.violated)
      out.violated = chk.violated;
    else {
      // Borderline: report the tightest inequality.
      double worst = -kInf;
      for (int i = 0; i < n; ++i) {
        const double m = one_norm_spread(x, y, d, i) - one_norm_spread(y, y, d, i);
        if (m > worst) {
          worst = m;
          out.violated = i;
        }
      }
    }
    return out;
  }
  out.feasible = true;
  out.matrix.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out.matrix(i, j) = sol.x[var(i, j)];
  out.residual = sol.residual;
  out.conditioning_warning = sol.residual > 1e-10 * scale_of(y);
  return out;
}

MajPolytope::MajPolytope(const RealVector& d, const RealVector& y) : d_(d), y_(y) {
  validate_triple(d, y);
  if (y.minCoeff() < 0) throw InvalidInput("y must be nonnegative");
  const int n = static_cast<int>(d.size());
  if (n > 20) throw InvalidInput("polytope construction limited to n <= 20");
  total_ = y.sum();
  ThermoCurve th(d, y);
  const unsigned long full = (1ul << n) - 1;
  for (unsigned long bits = 1; bits < full; ++bits) {
    Halfspace h;
    h.mask.resize(static_cast<size_t>(n));
    double md = 0;
    for (int i = 0; i < n; ++i) {
      h.mask[i] = (bits >> i) & 1u;
      if (h.mask[i]) md += d[i];
    }
    h.bound = th(md);
    hs_.push_back(std::move(h));
  }
}

double MajPolytope::min_slack(const RealVector& x) const {
  if (x.size() != d_.size()) throw InvalidInput("dimension mismatch");
  double s = kInf;
  for (const auto& h : hs_) {
    double mx = 0;
    for (size_t i = 0; i < h.mask.size(); ++i)
      if (h.mask[i]) mx += x[static_cast<Eigen::Index>(i)];
    s = std::min(s, h.bound - mx);
  }
  return s;
}

bool MajPolytope::contains(const RealVector& x, double tol) const {
  if (x.size() != d_.size()) throw InvalidInput("dimension mismatch");
  if (std::abs(x.sum() - total_) > tol) return false;
  for (const auto& h : hs_) {
    double mx = 0;
    for (size_t i = 0; i < h.mask.size(); ++i)
      if (h.mask[i]) mx += x[static_cast<Eigen::Index>(i)];
    if (mx > h.bound + tol) return false;
  }
  return true;
}

std::vector<RealVector> MajPolytope::vertices(double dedup_tol) const {
  const int n = dim();
  if (n > 9) throw InvalidInput("vertex enumeration limited to n <= 9");
  std::vector<RealVector> out;
  for (const auto& sigma : all_permutations(n)) {
    RealVector e = extreme_point(d_, y_, sigma);
    bool dup = false;
    for (const auto& v : out)
      if ((v - e).cwiseAbs().maxCoeff() <= dedup_tol) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(e));
  }
  return out;
}

MajPolytope polytope(const RealVector& d, const RealVector& y) { return MajPolytope(d, y); }

RealVector extreme_point(const RealVector& d, const RealVector& y, const std::vector<int>& sigma) {
  validate_triple(d, y);
  if (static_cast<Eigen::Index>(sigma.size()) != d.size() || !is_permutation(sigma))
    throw InvalidInput("sigma must be a permutation of the coordinates");
  ThermoCurve th(d, y);
  RealVector e(d.size());
  double prev_c = 0, prev_v = 0;
  for (size_t k = 0; k < sigma.size(); ++k) {
    const double c = (k + 1 == sigma.size()) ? th.abscissas()[d.size()] : prev_c + d[sigma[k]];
    const double v = th(c);
    e[sigma[k]] = v - prev_v;
    prev_c = c;
    prev_v = v;
  }
  return e;
}

RealVector max_corner(const RealVector& d, const RealVector& y) {
  validate_triple(d, y);
  return extreme_point(d, y, argsort_descending(d));
}

}  // namespace thermo::thermomaj
