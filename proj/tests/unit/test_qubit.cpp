#include "support.hpp"
#include "thermo/qubit.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace thermo;
using namespace thermo::qubit;

namespace {

QubitThermalParams random_thermal(std::mt19937_64& rng, double eps) {
  std::uniform_real_distribution<double> u(0, 1);
  QubitThermalParams p;
  p.eps = eps;
  p.mu = u(rng);
  p.c = std::polar(u(rng) * thermal_radius(p.mu, eps), 2 * std::numbers::pi * u(rng));
  return p;
}

// Superoperator entries written out without the thermal-bound check.
ComplexMatrix raw_matrix(const QubitThermalParams& p) {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1 - p.eps * p.mu;
  m(0, 3) = p.mu;
  m(1, 1) = p.c;
  m(2, 2) = std::conj(p.c);
  m(3, 0) = p.eps * p.mu;
  m(3, 3) = 1 - p.mu;
  return m;
}

SemigroupParams random_semigroup(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  SemigroupParams sp;
  sp.eps = u(rng);
  sp.u = 2 * u(rng);
  sp.x = 0.5 * sp.u * (1 + sp.eps) + u(rng);
  sp.omega = 4 * u(rng) - 2;
  return sp;
}

}  // namespace

TEST_CASE("closed-form semigroup element equals the exponential of its generator") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const SemigroupParams sp = random_semigroup(rng);
    const double t = u(rng);
    const Superoperator ref = expm(generator_of(sp) * Complex(t));
    const QubitThermalParams p = semigroup_element(sp, t);
    CHECK(max_abs(superoperator_of(p).matrix() - ref.matrix()) < 1e-12);
    CHECK(is_markovian(p));
    CHECK(1 - p.mu * (1 + p.eps) > 0);
  }
  SemigroupParams bad{1.0, 0.1, 0, 0.5};
  CHECK_THROWS_AS(semigroup_element(bad, 1.0), InvalidInput);
  CHECK_THROWS_AS(semigroup_element(SemigroupParams{1, 1, 0, 0.5}, -1), InvalidInput);
}

TEST_CASE("composition matches the product of superoperators") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0.01, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const double e1 = u(rng), e2 = trial % 2 ? e1 : u(rng);
    const QubitThermalParams p1 = random_thermal(rng, e1), p2 = random_thermal(rng, e2);
    const Composite c = compose(p1, p2);
    const ComplexMatrix prod = superoperator_of(p1).matrix() * superoperator_of(p2).matrix();
    CHECK(max_abs(raw_matrix(c.params) - prod) < 1e-12);
    if (p1.eps == p2.eps) CHECK(is_thermal(c.params));
    const double lhs = 1 - c.params.mu - c.params.eps * c.params.mu;
    const double rhs = (1 - p1.mu * (1 + p1.eps)) * (1 - p2.mu * (1 + p2.eps));
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("equal temperatures commute, unequal ones need not") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 50; ++trial) {
    const double eps = 0.1 + 0.8 * trial / 50.0;
    const QubitThermalParams p1 = random_thermal(rng, eps), p2 = random_thermal(rng, eps);
    const Composite a = compose(p1, p2), b = compose(p2, p1);
    CHECK(std::abs(a.params.mu - b.params.mu) < 1e-14);
    CHECK(std::abs(a.params.eps - b.params.eps) < 1e-12);
    CHECK(std::abs(a.params.c - b.params.c) < 1e-14);
  }
  const QubitThermalParams p1{0.5, 0.2, 0.5}, p2{0.3, 0.9, 0.5};
  CHECK(std::abs(compose(p1, p2).params.mu - compose(p2, p1).params.mu) > 1e-3);
}

TEST_CASE("psi map is a homomorphism at fixed temperature") {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 50; ++trial) {
    const double eps = 0.05 + 0.9 * trial / 50.0;
    const Superoperator s1 = superoperator_of(random_thermal(rng, eps));
    const Superoperator s2 = superoperator_of(random_thermal(rng, eps));
    const PsiValue direct = psi_map(s1 * s2);
    const PsiValue law = compose_psi(psi_map(s1), psi_map(s2), eps);
    CHECK(std::abs(direct.mu - law.mu) < 1e-14);
    CHECK(std::abs(direct.c - law.c) < 1e-14);
  }
  CHECK_THROWS_AS(psi_map(Superoperator::zero(3)), InvalidInput);
}

TEST_CASE("reset and swap channels") {
  const double eps = 0.4;
  const QubitThermalParams reset{1 / (1 + eps), eps, 0};
  const ComplexMatrix m = superoperator_of(reset).matrix();
  // Both computational states are sent to the Gibbs state.
  CHECK(std::abs(m(0, 0) - 1 / (1 + eps)) < 1e-15);
  CHECK(std::abs(m(0, 3) - 1 / (1 + eps)) < 1e-15);
  CHECK(std::abs(m(3, 0) - eps / (1 + eps)) < 1e-15);
  const Classification cr = classify(reset);
  CHECK(cr.region == Region::Markovian);
  CHECK(cr.boundary);

  const QubitThermalParams swap{1, eps, 0};
  CHECK(is_thermal(swap));
  CHECK_FALSE(is_markovian(swap));
  CHECK(classify(swap).region == Region::ThermalNonMarkovian);
  CHECK(classify(QubitThermalParams{1, eps, 0.1}).region == Region::NonThermal);
  CHECK_THROWS_AS(superoperator_of(QubitThermalParams{1, eps, 0.1}), InvalidInput);
}

TEST_CASE("radii and region ordering") {
  std::mt19937_64 rng(113);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const double eps = u(rng), mu = u(rng) / (1 + eps);
    CHECK(markov_radius(mu, eps) <= thermal_radius(mu, eps) + 1e-15);
    CHECK(thermal_radius(mu, eps) == Catch::Approx(std::sqrt((1 - eps * mu) * (1 - mu))));
  }
  CHECK(thermal_radius(1, 0.3) == 0.0);
  CHECK(thermal_radius(0, 0.3) == 1.0);
  // Nearly zero temperature: the two regions almost coincide.
  const double eps = 1e-9;
  const QubitThermalParams p{0.5, eps, std::sqrt(0.5) - 1e-6};
  CHECK(classify(p).region == Region::Markovian);
  CHECK(thermal_radius(0.5, eps) - markov_radius(0.5, eps) < 1e-9);
}

TEST_CASE("complex time past the critical population") {
  const double eps = 0.5;
  const Complex t = complex_time(0.3, eps);
  CHECK(std::abs(t.imag()) < 1e-15);
  CHECK(t.real() == Catch::Approx(-std::log(1 - 0.3 * 1.5) / 1.5));
  const Complex beyond = complex_time(0.9, eps);
  CHECK(std::abs(beyond.imag()) == Catch::Approx(std::numbers::pi / (1 + eps)));
  CHECK(std::isinf(complex_time(1 / (1 + eps), eps).real()));
}

TEST_CASE("gap between thermal and Markovian regions") {
  // The full swap (mu = 1, c = 0) is at distance eps/(1+eps) from mu <= 1/(1+eps).
  for (double eps : {0.6, 0.2, 0.01, 0.005}) CHECK(markov_gap(eps, 400) >= eps / (1 + eps) - 1e-12);
  CHECK(markov_gap(0.6, 400) == Catch::Approx(0.375).margin(1e-3));
  const double g1 = markov_gap(0.01, 1000), g2 = markov_gap(0.005, 1000);
  CHECK(g2 < g1);
  CHECK(g1 < 0.02);
  CHECK(markov_gap(0.0, 400) < 1e-3);
  CHECK_THROWS_AS(markov_gap(1.0), InvalidInput);
}

TEST_CASE("region samples lie on their boundaries") {
  const RegionSample s = mto_region_sample(0.3, 16);
  REQUIRE(s.markovian.size() == 256);
  for (const auto& p : s.markovian) CHECK(std::abs(std::abs(p.c) - markov_radius(p.mu, 0.3)) < 1e-14);
  for (const auto& p : s.thermal) CHECK(std::abs(std::abs(p.c) - thermal_radius(p.mu, 0.3)) < 1e-14);
  CHECK_THROWS_AS(mto_region_sample(1.2, 16), InvalidInput);
}
