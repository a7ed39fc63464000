#include "thermo/toy.hpp"

#include "thermo/gksl.hpp"
#include "thermo/lp.hpp"
#include "thermo/simd.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace thermo::toy {

// ---------------------------------------------------------------------------
// Generators

ToyGenerator::ToyGenerator(const RealMatrix& b, double tol) : b_(b), a_(std::numeric_limits<double>::quiet_NaN()) {
  if (b.rows() != b.cols() || b.rows() < 2) throw InvalidInput("generator must be square with n >= 2");
  if (!b.allFinite()) throw InvalidInput("generator has non-finite entries");
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      if (i != j && -b(i, j) < -tol * scale) throw InvalidInput("-B must have nonnegative off-diagonal entries");
  if (b.colwise().sum().cwiseAbs().maxCoeff() > tol * scale) throw InvalidInput("B must have zero column sums");
  Eigen::FullPivLU<RealMatrix> lu(b);
  lu.setThreshold(1e-10);
  const RealMatrix ker = lu.kernel();
  if (ker.cols() != 1) throw InvalidInput("fixed point of B is not unique");
  RealVector d = ker.col(0);
  d /= d.sum();
  if (d.minCoeff() < -tol) throw InvalidInput("null vector of B is not a probability vector");
  d_ = ProbVector(d, tol);
}

ToyGenerator ToyGenerator::permuted(const Permutation& p) const {
  const RealMatrix pm = permutation_matrix(p);
  ToyGenerator g(pm * b_ * pm.transpose());
  return g;
}

ToyGenerator ToyGenerator::symmetrized() const {
  RealMatrix s = RealMatrix::Zero(b_.rows(), b_.cols());
  const auto perms = all_permutations(dim());
  for (const auto& p : perms) {
    const RealMatrix pm = permutation_matrix(p);
    s += pm * b_ * pm.transpose();
  }
  return ToyGenerator(s / static_cast<double>(perms.size()));
}

ToyGenerator toy_generator_ladder(double a, int n) {
  if (!(a > 0) || !std::isfinite(a)) throw InvalidInput("ladder parameter a must be positive");
  if (n < 2) throw InvalidInput("need n >= 2");
  RealVector w(n);
  for (int k = 0; k < n; ++k) w[k] = std::pow(a, k);
  const GibbsVector d(w);
  const Superoperator gamma = gksl::ladder_dissipator(d);
  RealMatrix b(n, n);
  for (int j = 0; j < n; ++j) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e(j, j) = 1;
    const ComplexMatrix img = gamma.apply(e);
    for (int i = 0; i < n; ++i) b(i, j) = img(i, i).real();
  }
  ToyGenerator g(b);
  g.source_ = ToyGenerator::Source::Ladder;
  g.a_ = a;
  return g;
}

// ---------------------------------------------------------------------------
// Propagation

FlowPropagator::FlowPropagator(const ToyGenerator& g) : b_(g.b()) {
  const RealVector& d = g.fixed_point().entries();
  const auto n = b_.rows();
  if (d.minCoeff() <= 0) return;
  const double scale = std::max(1.0, b_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      if (std::abs(b_(i, j) * d[j] - b_(j, i) * d[i]) > 1e-12 * scale) return;
  sqrt_d_ = d.cwiseSqrt();
  RealMatrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = b_(i, j) * sqrt_d_[j] / sqrt_d_[i];
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(s);
  lambda_ = es.eigenvalues();
  q_ = es.eigenvectors();
  spectral_ = true;
}

RealMatrix FlowPropagator::matrix(double t) const {
  if (!(t >= 0)) throw InvalidInput("flow time must be nonnegative");
  if (spectral_) {
    const RealVector ex = (-t * lambda_).array().exp();
    RealMatrix core = q_ * ex.asDiagonal() * q_.transpose();
    return sqrt_d_.asDiagonal() * core * sqrt_d_.cwiseInverse().asDiagonal();
  }
  auto it = cache_.find(t);
  if (it != cache_.end()) return it->second;
  RealMatrix e = expm(RealMatrix(-t * b_));
  if (cache_.size() < 64) cache_.emplace(t, e);
  return e;
}

RealVector FlowPropagator::apply(double t, const RealVector& x) const {
  if (spectral_) {
    const RealVector y = q_.transpose() * x.cwiseQuotient(sqrt_d_);
    return sqrt_d_.cwiseProduct(q_ * (-t * lambda_).array().exp().matrix().cwiseProduct(y));
  }
  return matrix(t) * x;
}

void validate_schedule(const Schedule& s, int n) {
  for (size_t k = 0; k < s.size(); ++k) {
    if (static_cast<int>(s[k].perm.size()) != n || !is_permutation(s[k].perm))
      throw InvalidInput("schedule entry " + std::to_string(k) + " has an invalid permutation");
    if (!(s[k].dt >= 0) || !std::isfinite(s[k].dt))
      throw InvalidInput("schedule entry " + std::to_string(k) + " has an invalid duration");
  }
}

namespace {

RealVector renormalised(const RealVector& x) { return ProbVector(x, 1e-7).entries(); }

}  // namespace

Trajectory simulate(const ProbVector& x0, const ToyGenerator& g, const Schedule& s, const SimulateOptions& opt) {
  const int n = g.dim();
  if (x0.size() != n) throw InvalidInput("initial state dimension differs from generator");
  validate_schedule(s, n);
  if (!(opt.step > 0) || !std::isfinite(opt.step)) throw InvalidInput("step must be positive");
  if (!(opt.tail >= 0) || !std::isfinite(opt.tail)) throw InvalidInput("tail must be nonnegative");
  const FlowPropagator prop(g);
  const RealMatrix e_step = prop.matrix(opt.step);

  Trajectory out;
  RealVector x = x0.entries();
  double t0 = 0;
  out.push_back({0.0, ProbVector(x)});
  auto flow = [&](double dt) {
    const auto steps = static_cast<long>(std::floor(dt / opt.step + 1e-9));
    for (long k = 1; k <= steps; ++k) {
      x = renormalised(e_step * x);
      out.push_back({t0 + k * opt.step, ProbVector(x)});
    }
    const double rem = dt - steps * opt.step;
    if (rem > 1e-12) {
      x = renormalised(prop.apply(rem, x));
      out.push_back({t0 + dt, ProbVector(x)});
    }
    t0 += dt;
  };
  for (const auto& seg : s) {
    x = permute(seg.perm, x);
    out.push_back({t0, ProbVector(x)});
    flow(seg.dt);
  }
  if (opt.tail > 0) flow(opt.tail);
  return out;
}

Schedule ScheduleSampler::draw(int n, std::mt19937_64& rng) const {
  std::exponential_distribution<double> dur(1.0 / mean_duration);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Schedule s;
  Permutation p = identity_permutation(n);
  for (;;) {
    std::shuffle(p.begin(), p.end(), rng);
    s.push_back({p, dur(rng)});
    if (unif(rng) < stop_probability) break;
  }
  return s;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Convex bound

namespace {

bool ordered_like(const RealVector& z, const RealVector& d, const std::vector<int>& sigma, double tol) {
  for (size_t k = 0; k + 1 < sigma.size(); ++k) {
    const int i = sigma[k], j = sigma[k + 1];
    if (z[i] * d[j] < z[j] * d[i] - tol) return false;
  }
  return true;
}

}  // namespace

ProbVector ordered_past_cone_z(const ProbVector& x0, const GibbsVector& d) {
  const int n = x0.size();
  if (d.size() != n) throw InvalidInput("x0 and d have different lengths");
  const RealVector& xv = x0.entries();
  const RealVector& dv = d.entries();
  if (thermomaj::classical_majorises(xv, dv, 1e-12)) return d.prob();

  const std::vector<int> sigma = argsort_descending(dv);
  const RealVector xs = sorted_descending(xv);
  RealVector arranged(n);
  for (int k = 0; k < n; ++k) arranged[sigma[k]] = xs[k];
  if (ordered_like(arranged, dv, sigma, 1e-12)) return ProbVector(arranged);

  // Variables: z (n), t (n) with t >= |z - d|, s (n) with s >= |z - m|.
  const RealVector corner = thermomaj::max_corner(dv, xv);
  auto base = [&](lp::Problem& p) {
    const int nv = p.num_vars();
    RealVector row = RealVector::Zero(nv);
    row.head(n).setOnes();
    p.add(row, lp::Sense::Equal, xv.sum());
    double px = 0;
    for (int k = 0; k + 1 < n; ++k) {
      px += xs[k];
      row.setZero();
      for (int i = 0; i <= k; ++i) row[sigma[i]] = 1;
      p.add(row, lp::Sense::GreaterEq, px);
    }
    for (int k = 0; k + 1 < n; ++k) {
      const int i = sigma[k], j = sigma[k + 1];
      row.setZero();
      row[i] = dv[j];
      row[j] = -dv[i];
      p.add(row, lp::Sense::GreaterEq, 0.0);
    }
    for (int i = 0; i < n; ++i) {
      row.setZero();
      row[n + i] = 1;
      row[i] = -1;
      p.add(row, lp::Sense::GreaterEq, -dv[i]);
      row[i] = 1;
      p.add(row, lp::Sense::GreaterEq, dv[i]);
    }
  };

  lp::Problem first(2 * n);
  base(first);
  RealVector c1 = RealVector::Zero(2 * n);
  c1.tail(n).setOnes();
  first.set_objective(c1);
  const lp::Solution s1 = lp::solve(first, 1e-12);
  if (s1.status != lp::Status::Optimal) throw InternalError("ordered past cone LP is infeasible");

  lp::Problem second(3 * n);
  base(second);
  RealVector row = RealVector::Zero(3 * n);
  row.segment(n, n).setOnes();
  second.add(row, lp::Sense::LessEq, s1.objective + 1e-10);
  for (int i = 0; i < n; ++i) {
    row.setZero();
    row[2 * n + i] = 1;
    row[i] = -1;
    second.add(row, lp::Sense::GreaterEq, -corner[i]);
    row[i] = 1;
    second.add(row, lp::Sense::GreaterEq, corner[i]);
  }
  RealVector c2 = RealVector::Zero(3 * n);
  c2.tail(n).setOnes();
  second.set_objective(c2);
  const lp::Solution s2 = lp::solve(second, 1e-12);
  if (s2.status != lp::Status::Optimal) throw InternalError("ordered past cone tie-break LP is infeasible");
  RealVector z = s2.x.head(n).cwiseMax(0.0);
  return ProbVector(z / z.sum());
}

ReachBound::ReachBound(const ProbVector& z) : z_(z), poly_(RealVector::Ones(z.size()), z.entries()) {
  const RealVector& zv = z.entries();
  for (const auto& p : all_permutations(z.size())) {
    RealVector v = permute(p, zv);
    bool dup = false;
    for (const auto& w : vertices_)
      if ((w - v).cwiseAbs().maxCoeff() <= 1e-14) {
        dup = true;
        break;
      }
    if (!dup) vertices_.push_back(std::move(v));
  }
}

bool ReachBound::contains(const RealVector& x, double tol) const { return thermomaj::classical_majorises(x, z_, tol); }

double ReachBound::slack(const RealVector& x) const { return poly_.min_slack(x); }

ReachBound reach_bound(const ProbVector& x0, const ToyGenerator& g) {
  const GibbsVector d(g.fixed_point().entries());
  return ReachBound(ordered_past_cone_z(x0, d));
}

InwardReport vectorfield_inward_check(const ProbVector& z, const ToyGenerator& g, double tol) {
  const int n = z.size();
  if (g.dim() != n) throw InvalidInput("dimension mismatch");
  const ReachBound bound(z);
  const auto& hs = bound.halfspaces().halfspaces();
  std::vector<RealMatrix> gens;
  for (const auto& p : all_permutations(n)) gens.push_back(g.permuted(p).b());
  InwardReport r;
  r.worst = -kInf;
  for (const auto& v : bound.vertices())
    for (const auto& h : hs) {
      double mv = 0;
      RealVector m(n);
      for (int i = 0; i < n; ++i) m[i] = h.mask[i], mv += h.mask[i] * v[i];
      if (mv < h.bound - 1e-12) continue;
      for (const auto& b : gens) r.worst = std::max(r.worst, m.dot(-b * v));
    }
  r.ok = r.worst <= tol;
  return r;
}

// ---------------------------------------------------------------------------
// Monte-Carlo

namespace {

constexpr std::size_t kLanes = 256;

struct Lane {
  Schedule schedule;
  size_t seg = 0;
  double remaining = 0;
};

}  // namespace

ContainmentStats containment_sweep(const ProbVector& x0, const ToyGenerator& g, const ReachBound& bound,
                                   const CloudOptions& opt) {
  const int n = g.dim();
  if (x0.size() != n || bound.z().size() != n) throw InvalidInput("dimension mismatch");
  if (n > simd::kMaxDim) throw InvalidInput("containment sweep limited to n <= 8");
  if (!(opt.step > 0)) throw InvalidInput("step must be positive");
  const FlowPropagator prop(g);
  const RealMatrix e = prop.matrix(opt.step);
  std::vector<double> em(static_cast<size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) em[static_cast<size_t>(i * n + j)] = e(i, j);
  const auto& hs = bound.halfspaces().halfspaces();
  const int nh = static_cast<int>(hs.size());
  std::vector<double> normals(static_cast<size_t>(nh * n)), bounds(static_cast<size_t>(nh));
  for (int h = 0; h < nh; ++h) {
    bounds[h] = hs[h].bound;
    for (int j = 0; j < n; ++j) normals[static_cast<size_t>(h * n + j)] = hs[h].mask[j];
  }

  std::vector<double> lanes(static_cast<size_t>(n) * kLanes), slack(kLanes);
  std::vector<Lane> state(kLanes);
  ContainmentStats st;
  std::size_t next = 0;

  auto get = [&](size_t l) {
    RealVector x(n);
    for (int j = 0; j < n; ++j) x[j] = lanes[j * kLanes + l];
    return x;
  };
  auto put = [&](size_t l, const RealVector& x) {
    for (int j = 0; j < n; ++j) lanes[j * kLanes + l] = x[j];
  };
  auto record = [&](const RealVector& x) {
    st.min_slack = std::min(st.min_slack, bound.slack(x));
    ++st.samples;
  };
  auto start = [&](size_t l) {
    if (next >= opt.trajectories) return false;
    std::mt19937_64 rng(stream_seed(opt.seed, next++));
    state[l].schedule = opt.sampler.draw(n, rng);
    state[l].seg = 0;
    state[l].remaining = state[l].schedule[0].dt;
    const RealVector x = permute(state[l].schedule[0].perm, x0.entries());
    put(l, x);
    record(x);
    ++st.trajectories;
    return true;
  };

  size_t active = 0;
  while (active < kLanes && start(active)) ++active;
  while (active > 0) {
    for (size_t l = 0; l < active;) {
      Lane& ln = state[l];
      if (ln.remaining >= opt.step) {
        ++l;
        continue;
      }
      RealVector x = prop.apply(ln.remaining, get(l));
      record(x);
      if (ln.seg + 1 < ln.schedule.size()) {
        ++ln.seg;
        x = permute(ln.schedule[ln.seg].perm, x);
        ln.remaining = ln.schedule[ln.seg].dt;
        put(l, x);
        record(x);
        continue;
      }
      if (start(l)) continue;
      --active;
      if (l != active) {
        put(l, get(active));
        std::swap(state[l], state[active]);
      }
    }
    if (active == 0) break;
    simd::apply_matrix(em.data(), n, lanes.data(), kLanes, active);
    simd::min_slack(normals.data(), bounds.data(), nh, n, lanes.data(), kLanes, active, slack.data());
    for (size_t l = 0; l < active; ++l) {
      state[l].remaining -= opt.step;
      st.min_slack = std::min(st.min_slack, slack[l]);
    }
    st.samples += active;
  }
  return st;
}

std::vector<RealVector> reach_cloud(const ProbVector& x0, const ToyGenerator& g, const CloudOptions& opt, bool dense) {
  const int n = g.dim();
  if (x0.size() != n) throw InvalidInput("dimension mismatch");
  const FlowPropagator prop(g);
  const RealMatrix e = prop.matrix(opt.step);
  std::vector<RealVector> out;
  for (std::size_t k = 0; k < opt.trajectories; ++k) {
    std::mt19937_64 rng(stream_seed(opt.seed, k));
    const Schedule s = opt.sampler.draw(n, rng);
    RealVector x = x0.entries();
    for (const auto& seg : s) {
      x = permute(seg.perm, x);
      if (dense) {
        double left = seg.dt;
        while (left >= opt.step) {
          x = e * x;
          left -= opt.step;
          out.push_back(x);
        }
        x = prop.apply(left, x);
      } else {
        x = prop.apply(seg.dt, x);
      }
    }
    out.push_back(x);
  }
  return out;
}

GreedyResult greedy_schedule(const ProbVector& x0, const RealVector& target, const ToyGenerator& g,
                             int max_segments) {
  const int n = g.dim();
  if (target.size() != n || x0.size() != n) throw InvalidInput("dimension mismatch");
  const FlowPropagator prop(g);
  static const double grid[] = {0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0};
  std::vector<RealMatrix> flows;
  for (double t : grid) flows.push_back(prop.matrix(t));
  const auto perms = all_permutations(n);
  GreedyResult r;
  RealVector x = x0.entries();
  double dist = (x - target).cwiseAbs().sum();
  for (int k = 0; k < max_segments && dist > 1e-4; ++k) {
    double best = dist;
    int bp = -1, bt = -1;
    for (size_t p = 0; p < perms.size(); ++p) {
      const RealVector px = permute(perms[p], x);
      for (size_t t = 0; t < flows.size(); ++t) {
        const double dd = (flows[t] * px - target).cwiseAbs().sum();
        if (dd < best - 1e-12) best = dd, bp = static_cast<int>(p), bt = static_cast<int>(t);
      }
    }
    if (bp < 0) break;
    x = flows[bt] * permute(perms[bp], x);
    r.schedule.push_back({perms[bp], grid[bt]});
    dist = best;
  }
  r.final_state = x;
  r.distance = dist;
  return r;
}

}  // namespace thermo::toy
