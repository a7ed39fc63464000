#include "support.hpp"
#include "thermo/qutrit.hpp"
#include "thermo/thermomaj.hpp"
#include "thermo/toy.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace thermo;
using namespace thermo::qutrit;
using namespace testing_support;

namespace {

RealVector gibbs(double a) {
  RealVector w{{1, a, a * a}};
  return w / w.sum();
}

// Angle of the largest gap between consecutive nonzero rays, computed
// independently of derv_cone.
double largest_gap(const std::vector<RealVector>& rays) {
  std::vector<double> ang;
  for (const auto& r : rays) {
    const Point2 p = SimplexEmbedding::matrix() * r;
    if (p.norm() > 1e-14) ang.push_back(std::atan2(p.y(), p.x()));
  }
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + 2 * std::numbers::pi - ang.back();
  for (size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  return gap;
}

RealVector reflect23(const RealVector& x) { return RealVector{{x[0], x[2], x[1]}}; }

}  // namespace

TEST_CASE("embedding is an isometry onto the plane") {
  const auto& p = SimplexEmbedding::matrix();
  CHECK((p * p.transpose() - Eigen::Matrix2d::Identity()).norm() < 1e-15);
  CHECK((p * Eigen::Vector3d::Ones()).norm() < 1e-15);
  std::mt19937_64 rng(151);
  for (int k = 0; k < 20; ++k) {
    const RealVector x = random_simplex(rng, 3), y = random_simplex(rng, 3);
    CHECK(std::abs((SimplexEmbedding::embed(x) - SimplexEmbedding::embed(y)).norm() - (x - y).norm()) < 1e-14);
    CHECK((SimplexEmbedding::lift(SimplexEmbedding::embed(x)) - x).norm() < 1e-14);
  }
  CHECK(SimplexEmbedding::embed(RealVector::Constant(3, 1.0 / 3)).norm() < 1e-15);
  CHECK(SimplexEmbedding::embed(RealVector{{1, 0, 0}}).x() == Catch::Approx(0).margin(1e-15));
  CHECK(SimplexEmbedding::embed(RealVector{{1, 0, 0}}).y() > 0);
}

TEST_CASE("derivative cones at distinguished points") {
  const toy::ToyGenerator g = toy::toy_generator_ladder(0.3, 3);
  const DerivativeCone u = derv_cone(RealVector::Constant(3, 1.0 / 3), g);
  CHECK_FALSE(u.pointed);
  RealVector sum = RealVector::Zero(3);
  for (const auto& r : u.rays) sum += r;
  CHECK(sum.norm() < 1e-14);

  const DerivativeCone d = derv_cone(g.fixed_point().entries(), g);
  CHECK(d.has_zero_ray);
  CHECK_FALSE(d.pointed);

  const DerivativeCone v = derv_cone(RealVector{{1, 0, 0}}, g);
  CHECK(v.pointed);
  CHECK(v.max_gap == Catch::Approx(largest_gap(v.rays)).margin(1e-12));
  for (const auto& r : v.rays) CHECK(std::abs(r.sum()) < 1e-14);
  REQUIRE(v.perms.size() == 6);
  for (size_t k = 0; k < 6; ++k) {
    const RealVector ref = -(g.permuted(v.perms[k]).b() * RealVector{{1, 0, 0}});
    CHECK((v.rays[k] - ref).norm() < 1e-14);
  }
}

TEST_CASE("stabilisability certificates") {
  const toy::ToyGenerator g = toy::toy_generator_ladder(0.3, 3);
  for (const auto& p : all_permutations(3)) {
    const StabCertificate c = is_stabilisable(permute(p, g.fixed_point().entries()), g);
    CHECK(c.stabilisable);
  }
  CHECK(is_stabilisable(RealVector::Constant(3, 1.0 / 3), g).stabilisable);

  std::mt19937_64 rng(157);
  int yes = 0, no = 0;
  for (int k = 0; k < 200; ++k) {
    const RealVector x = random_simplex(rng, 3);
    const StabCertificate c = is_stabilisable(x, g);
    const DerivativeCone cone = derv_cone(x, g);
    if (c.stabilisable) {
      ++yes;
      CHECK(c.weights.minCoeff() >= -1e-12);
      CHECK(c.weights.sum() == Catch::Approx(1.0));
      RealVector s = RealVector::Zero(3);
      for (size_t i = 0; i < cone.rays.size(); ++i) s += c.weights[i] * cone.rays[i];
      CHECK(s.norm() < 1e-9);
      CHECK(largest_gap(cone.rays) <= std::numbers::pi + 1e-9);
    } else {
      ++no;
      for (const auto& r : cone.rays) CHECK(c.alpha.dot(r) < 0);
      CHECK(largest_gap(cone.rays) > std::numbers::pi - 1e-9);
    }
  }
  CHECK(yes > 0);
  CHECK(no > 0);
}

TEST_CASE("parabolic boundary at a = 1/4") {
  const auto arcs = stab_boundary(0.25);
  REQUIRE(arcs.size() == 6);
  const BoundaryConic& c = arcs.front();
  CHECK(c.kind == ConicCase::Parabolic);
  CHECK(c.lambda_max == Catch::Approx(1.0 / 7).margin(1e-12));
  CHECK((c.base_point(0) - Point2(0, 1 / std::sqrt(6.0))).norm() < 1e-15);

  const RealVector d = gibbs(0.25);
  const Point2 ed = SimplexEmbedding::embed(d), et = SimplexEmbedding::embed(reflect23(d));
  const Point2 lo = c.base_point(-1.0 / 7), hi = c.base_point(1.0 / 7);
  CHECK((lo - ed).norm() < 1e-9);
  CHECK((hi - et).norm() < 1e-9);
  CHECK(std::abs(lo.x() + 0.10102) < 1e-4);
  CHECK(std::abs(hi.x() - 0.10102) < 1e-4);
  CHECK(std::abs(lo.y() - 0.52497) < 1e-4);

  for (double l : {-1.0 / 7, -0.1, 0.0, 0.05, 1.0 / 7}) {
    const RealVector k = kernel_intersection_point(0.25, l).entries();
    const RealVector f = RealVector{{4 + 28 * l * l, -14 * l * l - 3 * l + 1, -14 * l * l + 3 * l + 1}} / 6;
    CHECK((k - f).norm() < 1e-9);
    CHECK((SimplexEmbedding::embed(k) - c.base_point(l)).norm() < 1e-9);
  }
  CHECK((kernel_intersection_point(0.25, 0).entries() - RealVector{{2.0 / 3, 1.0 / 6, 1.0 / 6}}).norm() < 1e-12);
  CHECK_THROWS_AS(kernel_intersection_point(0.25, 0.2), DomainError);
}

TEST_CASE("conic families and their endpoints") {
  for (double a : {0.05, 0.2, 0.3, 0.5, 0.8, 2.0, 4.0}) {
    const auto arcs = stab_boundary(a);
    REQUIRE(arcs.size() == 6);
    for (const auto& c : arcs) {
      const double f = c.family;
      CHECK((std::abs(f - a) < 1e-15 || std::abs(f - 1 / a) < 1e-15));
      if (f < 0.25) CHECK(c.kind == ConicCase::Elliptic);
      if (f > 0.25) CHECK(c.kind == ConicCase::Hyperbolic);
      // Endpoints are embedded permutations of the family's Gibbs point.
      const RealVector df = gibbs(f);
      double best_s = kInf, best_e = kInf;
      for (const auto& p : all_permutations(3)) {
        const Point2 q = SimplexEmbedding::embed(permute(p, df));
        best_s = std::min(best_s, (q - c.start).norm());
        best_e = std::min(best_e, (q - c.end).norm());
      }
      CHECK(best_s < 1e-9);
      CHECK(best_e < 1e-9);
      const auto s = c.sample(50);
      CHECK((s.front() - c.start).norm() < 1e-9);
      CHECK((s.back() - c.end).norm() < 1e-9);
    }
    if (std::abs(a - 0.25) > 0.01) {
      const BoundaryConic& base = arcs.front();
      for (double frac : {-0.9, -0.3, 0.0, 0.6}) {
        const double l = frac * base.lambda_max;
        const Point2 k = SimplexEmbedding::embed(kernel_intersection_point(a, l).entries());
        CHECK((k - base.base_point(l)).norm() < 1e-9);
      }
    }
  }
  // Family a and 1/a share the Gibbs point up to reversal.
  CHECK((gibbs(4.0) - gibbs(0.25).reverse()).norm() < 1e-15);
}

TEST_CASE("boundary points carry half-plane cones") {
  for (double a : {0.2, 0.3, 0.5}) {
    const toy::ToyGenerator g = toy::toy_generator_ladder(a, 3);
    for (const auto& c : stab_boundary(a)) {
      const auto s = c.sample(9);
      for (size_t i = 1; i + 1 < s.size(); ++i) {
        const RealVector x = SimplexEmbedding::lift(s[i]);
        if (x.minCoeff() < 0) continue;
        CHECK(std::abs(largest_gap(derv_cone(x, g).rays) - std::numbers::pi) < 1e-4);
      }
    }
  }
}

TEST_CASE("degenerate and invalid parameters") {
  const auto one = stab_boundary(1.0);
  REQUIRE(one.size() == 1);
  CHECK(one.front().kind == ConicCase::DegenerateUnital);
  CHECK(one.front().point(0).norm() < 1e-15);
  CHECK_THROWS_AS(stab_boundary(0.0), InvalidInput);
  CHECK_THROWS_AS(stab_boundary(-0.5), InvalidInput);
  CHECK_THROWS_AS(kernel_intersection_point(1.0, 0.0), DomainError);
}

TEST_CASE("grid classification matches the boundary polygon") {
  for (double a : {0.2, 0.3, 0.5}) {
    const toy::ToyGenerator g = toy::toy_generator_ladder(a, 3);
    const Polygon poly(stab_boundary_polygon(a));
    CHECK(poly.is_simple());
    const int res = 60;
    int agree = 0, total = 0;
    for (int i = 0; i <= res; ++i)
      for (int j = 0; i + j <= res; ++j) {
        const RealVector x{{double(i) / res, double(j) / res, double(res - i - j) / res}};
        const Point2 p = SimplexEmbedding::embed(x);
        const bool lp = is_stabilisable(x, g).stabilisable;
        const bool geo = poly.contains(p);
        ++total;
        if (lp == geo || poly.boundary_distance(p) < 1.0 / res) ++agree;
      }
    CHECK(agree == total);
  }
}

TEST_CASE("stabilisable set is symmetric under coordinate permutations") {
  const double a = 0.3;
  const Polygon poly(stab_boundary_polygon(a, 4000));
  const auto arcs = stab_boundary(a);
  for (const auto& c : arcs)
    for (const auto& p : all_permutations(3))
      for (const Point2& q : c.sample(7)) {
        const Point2 img = SimplexEmbedding::embed(permute(p, SimplexEmbedding::lift(q)));
        CHECK(poly.boundary_distance(img) < 1e-7);
      }
}

TEST_CASE("extremal fields") {
  const toy::ToyGenerator g = toy::toy_generator_ladder(0.3, 3);
  CHECK_THROWS_AS(extremal_field(RealVector::Constant(3, 1.0 / 3), g, Side::Left), DomainError);
  CHECK(extremal_field(g.fixed_point().entries(), g, Side::Left).degenerate);

  std::mt19937_64 rng(163);
  int checked = 0;
  for (int k = 0; k < 100; ++k) {
    const RealVector x = random_simplex(rng, 3);
    if (is_stabilisable(x, g).stabilisable) continue;
    const ExtremalField l = extremal_field(x, g, Side::Left), r = extremal_field(x, g, Side::Right);
    const ExtremalField lm = extremal_field(reflect23(x), g, Side::Left);
    CHECK((lm.velocity - reflect23(r.velocity)).norm() < 1e-12);
    // Every ray lies between the two extremal rays (counterclockwise from right to left).
    const Point2 pl = SimplexEmbedding::matrix() * l.velocity, pr = SimplexEmbedding::matrix() * r.velocity;
    const double span = std::atan2(pr.x() * pl.y() - pr.y() * pl.x(), pr.dot(pl));
    CHECK(span >= -1e-12);
    for (const auto& ray : derv_cone(x, g).rays) {
      const Point2 q = SimplexEmbedding::matrix() * ray;
      if (q.norm() < 1e-14) continue;
      const double from_right = std::atan2(pr.x() * q.y() - pr.y() * q.x(), pr.dot(q));
      CHECK(from_right >= -1e-9);
      CHECK(from_right <= span + 1e-9);
    }
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("extremal curves from d end on the chamber walls inside the polytope of d") {
  for (double a : {0.05, 0.3, 0.5, 0.95}) {
    const toy::ToyGenerator g = toy::toy_generator_ladder(a, 3);
    const RealVector d = g.fixed_point().entries();
    for (Side side : {Side::Left, Side::Right}) {
      const EmbeddedCurve c = integrate_extremal(d, g, side);
      CHECK(c.reason == Termination::WeylWall);
      CHECK(c.t.back() < 1e3);
      const thermomaj::MajPolytope m(RealVector::Ones(3), d);
      for (const auto& x : c.x) CHECK(m.min_slack(x) >= -1e-8);
      for (size_t i = 1; i < c.t.size(); ++i) CHECK(c.t[i] >= c.t[i - 1]);
    }
  }
}

TEST_CASE("reachable set of d") {
  const toy::ToyGenerator g = toy::toy_generator_ladder(0.5, 3);
  const RealVector d = g.fixed_point().entries();
  const ReachRegion r = reachable_set(d, g);
  CHECK(r.is_class_of_d());
  CHECK(r.class_part().is_simple());
  CHECK(r.contains(d));
  CHECK(r.contains(RealVector::Constant(3, 1.0 / 3)));
  CHECK(Polygon(r.class_boundary()).is_simple());
  const ReachRegion u = reachable_set(RealVector::Constant(3, 1.0 / 3), g);
  CHECK(u.is_class_of_d());
  // The stabilisable set sits inside [d].
  for (const auto& q : stab_boundary_polygon(0.5, 50))
    CHECK(r.contains(SimplexEmbedding::lift(q), 1e-6));
}

TEST_CASE("reachability order") {
  const toy::ToyGenerator g = toy::toy_generator_ladder(0.3, 3);
  const RealVector d = g.fixed_point().entries();
  const RealVector far{{0.9, 0.07, 0.03}};
  CHECK(reach_order(far, d, g) == Order::Forward);
  CHECK(reach_order(d, far, g) == Order::Backward);
  CHECK(reach_order(d, RealVector::Constant(3, 1.0 / 3), g) == Order::Equivalent);
  // Points along an extremal curve from far are strictly ordered.
  const EmbeddedCurve c = integrate_extremal(far, g, Side::Left);
  REQUIRE(c.x.size() > 10);
  const RealVector mid = c.x[c.x.size() / 2];
  CHECK(reach_order(far, mid, g) == Order::Forward);
  const RealVector v2{{0.05, 0.05, 0.9}}, v3{{0.05, 0.9, 0.05}};
  CHECK(reach_order(v2, v3, g) == Order::Equivalent);
}

TEST_CASE("random toy trajectories stay inside the reachable region") {
  for (double a : {0.3, 0.5}) {
    const toy::ToyGenerator g = toy::toy_generator_ladder(a, 3);
    for (const RealVector& x0 : {RealVector{{0.9, 0.07, 0.03}}, RealVector{{0.6, 0.35, 0.05}}}) {
      const ReachRegion r = reachable_set(x0, g);
      toy::CloudOptions opt;
      opt.trajectories = 200;
      opt.seed = 17;
      int outside = 0;
      for (const auto& p : toy::reach_cloud(ProbVector(x0), g, opt, true))
        if (!r.contains(p, 1e-6)) ++outside;
      CHECK(outside == 0);
    }
  }
}
