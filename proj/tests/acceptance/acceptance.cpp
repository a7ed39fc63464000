// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "support.hpp"
#include "thermo/gksl.hpp"
#include "thermo/qubit.hpp"
#include "thermo/qutrit.hpp"
#include "thermo/thermomaj.hpp"
#include "thermo/toy.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace thermo;
using namespace testing_support;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

RealVector ladder_gibbs(double a) {
  RealVector w{{1, a, a * a}};
  return w / w.sum();
}

// 1. Qutrit generator entries.
Outcome qutrit_generator() {
  double worst = 0;
  for (int k = 1; k <= 9; ++k) {
    const double a = 0.1 * k;
    RealMatrix m(3, 3);
    m << -a, 1, 0, a, -1 - a, 1, 0, a, -1;
    const RealMatrix expected = 2 / (1 + a) * m;
    worst = std::max(worst, (-toy::toy_generator_ladder(a, 3).b() - expected).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, fmt("max entry error %.2e", worst)};
}

// 2. Lindblad operators of the ladder coupling.
Outcome ladder_operators() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  double raise_err = 0, lower_err = 0, diag = 0;
  int cases = 0;
  for (int n = 2; n <= 5; ++n)
    for (int rep = 0; rep < 5; ++rep) {
      const gksl::LadderCoupling lc = gksl::ladder_coupling(n, u(rng), u(rng));
      const gksl::MarkovGenerator mg =
          gksl::markov_to_generator(lc.h_tot, lc.h_bath, ComplexMatrix::Zero(n, n), lc.setup);
      const gksl::LadderOps lo = gksl::ladder_ops(lc.setup.gibbs(), n);
      for (const auto& t : mg.terms) {
        if (t.row == t.col) diag = std::max(diag, max_abs(t.op));
        if (t.row == 0 && t.col == 1) raise_err = std::max(raise_err, max_abs(t.op - lo.raise));
        if (t.row == 1 && t.col == 0) lower_err = std::max(lower_err, max_abs(t.op - lo.lower));
      }
      ++cases;
    }
  const bool ok = diag == 0.0 && raise_err <= 1e-15 && lower_err <= 1e-12;
  std::ostringstream os;
  os << cases << " couplings; diagonal " << diag << ", raise " << fmt("%.2e", raise_err) << ", lower "
     << fmt("%.2e", lower_err);
  return {ok, os.str()};
}

// 3. Closed form of the qubit semigroup, starting from the worked dilation.
Outcome qubit_semigroup() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0, 1);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const double temp = 0.2 + 3 * uni(rng), eps = std::exp(-1 / temp);
    const double u = 2 * uni(rng), x = 0.5 * u * (1 + eps) + uni(rng), omega = 4 * uni(rng) - 2, t = 5 * uni(rng);
    const double s = std::sqrt(2 * x - u * (1 + eps)) / 2;
    ComplexMatrix htot = ComplexMatrix::Zero(4, 4);
    htot(0, 0) = s;
    htot(2, 2) = -s;
    htot(1, 2) = htot(2, 1) = std::sqrt(u);
    const gksl::ThermalSetup setup(RealVector{{-0.5, 0.5}}, temp);
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = -omega / 2;
    h(1, 1) = omega / 2;
    const auto mg = gksl::markov_to_generator(htot, setup.h0(), h, setup);
    const ComplexMatrix st = (mg.generator.superop().matrix() * Complex(t)).exp();
    const double mu = (1 - std::exp(-t * u * (1 + eps))) / (1 + eps);
    const Complex c = std::exp(-x * t) * std::exp(Complex(0, -omega * t));
    ComplexMatrix closed = ComplexMatrix::Zero(4, 4);
    closed(0, 0) = 1 - eps * mu;
    closed(0, 3) = mu;
    closed(3, 0) = eps * mu;
    closed(3, 3) = 1 - mu;
    closed(1, 1) = c;
    closed(2, 2) = std::conj(c);
    worst = std::max(worst, max_abs(st - closed));
  }
  return {worst <= 1e-10, fmt("max entry error %.2e over 100 samples", worst)};
}

// 4. Closure of Markovian qubit channels under composition.
Outcome qubit_closure() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> uni(0, 1);
  auto draw = [&] {
    qubit::QubitThermalParams p;
    p.eps = uni(rng);
    p.mu = uni(rng) / (1 + p.eps);
    p.c = std::polar(uni(rng) * qubit::markov_radius(p.mu, p.eps), 2 * std::numbers::pi * uni(rng));
    return p;
  };
  int non_markov = 0;
  double worst = 0;
  for (int k = 0; k < 100000; ++k) {
    const auto p1 = draw(), p2 = draw();
    const auto c = qubit::compose(p1, p2).params;
    if (!qubit::is_markovian(c, 1e-12)) ++non_markov;
    const double lhs = 1 - c.mu - c.eps * c.mu;
    const double rhs = (1 - p1.mu - p1.eps * p1.mu) * (1 - p2.mu - p2.eps * p2.mu);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  std::ostringstream os;
  os << non_markov << " non-Markovian composites, identity error " << fmt("%.2e", worst);
  return {non_markov == 0 && worst <= 1e-12, os.str()};
}

RealMatrix random_d_stochastic(std::mt19937_64& rng, const RealVector& d) {
  const int n = static_cast<int>(d.size());
  std::uniform_real_distribution<double> u(0, 1);
  const double w = u(rng);
  RealMatrix a = w * RealMatrix::Identity(n, n) + (1 - w) * d * RealVector::Ones(n).transpose();
  for (int k = 0; k < 3; ++k) {
    const int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
    if (i == j) continue;
    const double lam = u(rng);
    RealMatrix t = RealMatrix::Identity(n, n);
    t(i, i) = 1 - lam * d[j] / (d[i] + d[j]);
    t(j, i) = lam * d[j] / (d[i] + d[j]);
    t(j, j) = 1 - lam * d[i] / (d[i] + d[j]);
    t(i, j) = lam * d[i] / (d[i] + d[j]);
    a = t * a;
  }
  return a;
}

// 5. Four characterisations of d-majorisation.
Outcome four_way() {
  std::mt19937_64 rng(5);
  int disagree = 0, yes = 0;
  const int total = 10000;
  for (int k = 0; k < total; ++k) {
    const int n = 2 + k % 3;
    const RealVector d = random_positive(rng, n);
    const RealVector y = random_simplex(rng, n);
    const RealVector x = k % 2 ? RealVector(random_d_stochastic(rng, d) * y) : random_simplex(rng, n);
    const bool lp = thermomaj::find_transition_matrix(d, y, x).feasible;
    const bool curve = thermomaj::d_majorises_by_curve(x, y, d, 1000);
    const bool elbows = thermomaj::d_majorises_by_elbows(x, y, d);
    const bool norms = thermomaj::d_majorises(x, y, d).holds;
    if (!(lp == curve && curve == elbows && elbows == norms)) ++disagree;
    yes += lp;
  }
  std::ostringstream os;
  os << disagree << " disagreements in " << total << " instances (" << yes << " majorised)";
  return {disagree == 0, os.str()};
}

// 6. Max corner dominates every extreme point.
Outcome max_corner() {
  std::mt19937_64 rng(6);
  int failures = 0;
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + k % 4;
    const RealVector d = random_positive(rng, n);
    const RealVector y = random_positive(rng, n, 0.01);
    const RealVector z = thermomaj::max_corner(d, y);
    bool ok = z.minCoeff() > 0;
    for (const auto& sigma : all_permutations(n))
      ok = ok && thermomaj::classical_majorises(thermomaj::extreme_point(d, y, sigma), z);
    failures += !ok;
  }
  return {failures == 0, std::to_string(failures) + " failures in 1000 instances"};
}

// 7. Figure configuration.
Outcome figure_values() {
  const double a = std::pow(std::tan(std::numbers::pi / 5), 2);
  const RealVector d = ladder_gibbs(a);
  const double derr = (d - RealVector{{0.55, 0.29, 0.16}}).cwiseAbs().maxCoeff();
  const ProbVector z = toy::ordered_past_cone_z(ProbVector{0.55, 0.40, 0.05}, GibbsVector(d));
  const double zerr = (z.entries() - RealVector{{0.65, 0.30, 0.05}}).cwiseAbs().maxCoeff();
  std::ostringstream os;
  os << "d=(" << fmt("%.4f", d[0]) << ", " << fmt("%.4f", d[1]) << ", " << fmt("%.4f", d[2]) << ") z=("
     << fmt("%.4f", z[0]) << ", " << fmt("%.4f", z[1]) << ", " << fmt("%.4f", z[2]) << ")";
  return {derr < 0.01 && zerr < 0.01, os.str()};
}

// 8. Random trajectories stay in conv{pi(z)}.
Outcome containment() {
  std::mt19937_64 rng(8);
  double worst = kInf;
  std::size_t samples = 0;
  for (double a : {0.25, 0.3, 0.5}) {
    const toy::ToyGenerator g = toy::toy_generator_ladder(a, 3);
    for (int k = 0; k < 20; ++k) {
      const ProbVector x0(random_simplex(rng, 3));
      toy::CloudOptions opt;
      opt.trajectories = 10000;
      opt.seed = rng();
      const auto st = toy::containment_sweep(x0, g, toy::reach_bound(x0, g), opt);
      worst = std::min(worst, st.min_slack);
      samples += st.samples;
    }
  }
  std::ostringstream os;
  os << "min slack " << fmt("%.2e", worst) << " over " << samples << " samples";
  return {worst >= -1e-9, os.str()};
}

// 9. Parabolic boundary at a = 1/4.
Outcome parabolic() {
  const auto arcs = qutrit::stab_boundary(0.25);
  const auto& c = arcs.front();
  const RealVector d = ladder_gibbs(0.25);
  RealVector dt = d;
  std::swap(dt[1], dt[2]);
  const double e1 = (c.base_point(-1.0 / 7) - qutrit::SimplexEmbedding::embed(d)).norm();
  const double e2 = (c.base_point(1.0 / 7) - qutrit::SimplexEmbedding::embed(dt)).norm();
  double worst = 0;
  for (int k = 0; k <= 200; ++k) {
    const double l = -1.0 / 7 + (2.0 / 7) * k / 200;
    const RealVector formula = RealVector{{4 + 28 * l * l, -14 * l * l - 3 * l + 1, -14 * l * l + 3 * l + 1}} / 6;
    worst = std::max(worst, (qutrit::kernel_intersection_point(0.25, l).entries() - formula).norm());
    worst = std::max(worst, (qutrit::SimplexEmbedding::embed(formula) - c.base_point(l)).norm());
  }
  std::ostringstream os;
  os << "endpoint errors " << fmt("%.2e", e1) << ", " << fmt("%.2e", e2) << "; kernel formula " << fmt("%.2e", worst);
  return {e1 <= 1e-4 && e2 <= 1e-4 && worst <= 1e-9, os.str()};
}

// 10. LP classification against the conic polygon.
Outcome stab_grid() {
  std::ostringstream os;
  bool ok = true;
  const int res = 400;
  for (double a : {0.2, 0.3, 0.5}) {
    const toy::ToyGenerator g = toy::toy_generator_ladder(a, 3);
    const qutrit::Polygon poly(qutrit::stab_boundary_polygon(a));
    long agree = 0, total = 0;
    for (int i = 0; i <= res; ++i)
      for (int j = 0; i + j <= res; ++j) {
        const RealVector x{{double(i) / res, double(j) / res, double(res - i - j) / res}};
        agree += qutrit::is_stabilisable(x, g).stabilisable == poly.contains(qutrit::SimplexEmbedding::embed(x));
        ++total;
      }
    const double frac = double(agree) / double(total);
    ok = ok && frac >= 0.995;
    for (const auto& p : all_permutations(3))
      ok = ok && qutrit::is_stabilisable(permute(p, g.fixed_point().entries()), g).stabilisable;
    os << "a=" << a << ": " << fmt("%.4f", 100 * frac) << "% ";
  }
  const auto one = qutrit::stab_boundary(1.0);
  const bool degenerate = one.size() == 1 && one.front().kind == qutrit::ConicCase::DegenerateUnital &&
                          one.front().point(0).norm() < 1e-15;
  os << (degenerate ? "a=1 degenerate" : "a=1 not degenerate");
  return {ok && degenerate, os.str()};
}

// 11. d and the centroid are reachable; stabilisable points are mutually equivalent.
Outcome reach_facts() {
  const double a = 0.3;
  const toy::ToyGenerator g = toy::toy_generator_ladder(a, 3);
  const RealVector d = g.fixed_point().entries();
  const RealVector centre = RealVector::Constant(3, 1.0 / 3);
  const toy::FlowPropagator prop(g);

  // Palindromic cycle of conjugated flows pi e^{-hB} pi^{-1}; powers of it
  // approximate the symmetrised flow that fixes the centroid.
  const double cycle = 1e-4;
  const auto perms = all_permutations(3);
  const RealMatrix step = prop.matrix(cycle / (2 * perms.size()));
  RealMatrix m = RealMatrix::Identity(3, 3);
  auto conj = [&](const Permutation& p) {
    const RealMatrix pm = permutation_matrix(p);
    return RealMatrix(pm * step * pm.transpose());
  };
  for (const auto& p : perms) m = conj(p) * m;
  for (auto it = perms.rbegin(); it != perms.rend(); ++it) m = conj(*it) * m;
  const long cycles = std::lround(50.0 / cycle);
  RealMatrix power = RealMatrix::Identity(3, 3), base = m;
  for (long e = cycles; e > 0; e >>= 1) {
    if (e & 1) power = base * power;
    base = base * base;
  }

  std::mt19937_64 rng(11);
  double to_d = 0, to_centre = 0;
  int region_misses = 0;
  for (int k = 0; k < 50; ++k) {
    const RealVector x0 = random_simplex(rng, 3);
    to_d = std::max(to_d, (prop.apply(50.0, x0) - d).norm());
    to_centre = std::max(to_centre, (power * x0 - centre).norm());
    const qutrit::ReachRegion r = qutrit::reachable_set(x0, g);
    region_misses += !r.contains(d) + !r.contains(centre);
  }

  // Stabilisable grid points, pairwise.
  std::vector<RealVector> stab;
  const int res = 12;
  for (int i = 0; i <= res; ++i)
    for (int j = 0; i + j <= res; ++j) {
      const RealVector x{{double(i) / res, double(j) / res, double(res - i - j) / res}};
      if (qutrit::is_stabilisable(x, g).stabilisable) stab.push_back(x);
    }
  std::vector<qutrit::ReachRegion> regions;
  for (const auto& x : stab) regions.push_back(qutrit::reachable_set(x, g));
  int not_equiv = 0, pairs = 0;
  for (size_t i = 0; i < stab.size(); ++i)
    for (size_t j = i + 1; j < stab.size(); ++j) {
      ++pairs;
      not_equiv += !(regions[i].contains(stab[j]) && regions[j].contains(stab[i]));
    }

  std::ostringstream os;
  os << "dist to d " << fmt("%.1e", to_d) << ", to centroid " << fmt("%.1e", to_centre) << ", region misses "
     << region_misses << ", " << not_equiv << "/" << pairs << " stabilisable pairs not equivalent";
  return {to_d < 1e-6 && to_centre < 1e-6 && region_misses == 0 && not_equiv == 0 && pairs > 0, os.str()};
}

// Dilated channel computed directly: index loops for the partial trace.
ComplexMatrix dilated_channel(const ComplexMatrix& h, const ComplexMatrix& w, double t) {
  const int m = static_cast<int>(w.rows()), n = static_cast<int>(h.rows()) / m;
  const ComplexMatrix u = (ComplexMatrix(h * Complex(0, -t))).exp();
  ComplexMatrix s(n * n, n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      ComplexMatrix in = ComplexMatrix::Zero(n * m, n * m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) in(i * m + a, j * m + b) = w(a, b);
      const ComplexMatrix out = u * in * u.adjoint();
      ComplexMatrix red = ComplexMatrix::Zero(n, n);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          for (int a = 0; a < m; ++a) red(p, q) += out(p * m + a, q * m + a);
      for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) s(p + n * q, i + n * j) = red(p, q);
    }
  return s;
}

// 12. Third-order remainder of the dilation expansion.
Outcome stinespring_order() {
  std::mt19937_64 rng(12);
  double worst = kInf;
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 2, m = 2 + (k / 2) % 2;
    const ComplexMatrix h = random_hermitian(rng, n * m);
    const ComplexMatrix w = random_density(rng, m);
    const gksl::TaylorTerms tt = gksl::stinespring_taylor(h, w);
    const ComplexMatrix id = ComplexMatrix::Identity(n * n, n * n);
    auto remainder = [&](double t) {
      return (dilated_channel(h, w, t) - id - t * tt.order1.matrix() - 0.5 * t * t * tt.order2.matrix()).norm();
    };
    const double t = 2e-2;
    const double slope = std::log2(remainder(t) / remainder(t / 2));
    worst = std::min(worst, slope);
  }
  return {worst >= 2.9, fmt("smallest slope %.3f over 50 instances", worst)};
}

// 13. Thermal and Markovian regions approach each other as eps -> 0.
Outcome zero_temperature() {
  const double g1 = qubit::markov_gap(0.01), g2 = qubit::markov_gap(0.005);
  std::ostringstream os;
  os << "gap(0.01)=" << fmt("%.5f", g1) << " gap(0.005)=" << fmt("%.5f", g2);
  return {g1 < 0.02 && g2 < 0.02 && g2 < g1, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"qutrit generator matches closed form", qutrit_generator},
      {"ladder coupling gives ladder operators", ladder_operators},
      {"qubit semigroup closed form", qubit_semigroup},
      {"Markovian qubit closure", qubit_closure},
      {"d-majorisation four-way equivalence", four_way},
      {"max corner dominates extreme points", max_corner},
      {"figure configuration values", figure_values},
      {"reach-bound containment", containment},
      {"parabolic boundary exactness", parabolic},
      {"stabilisable grid agreement", stab_grid},
      {"reachability order facts", reach_facts},
      {"dilation expansion order", stinespring_order},
      {"zero-temperature limit", zero_temperature},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
