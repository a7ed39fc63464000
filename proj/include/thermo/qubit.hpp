#pragma once

#include "thermo/core.hpp"

#include <vector>

namespace thermo::qubit {

// Thermal qubit channel: populations mixed by [[1 - eps mu, mu], [eps mu, 1 - mu]],
// coherence rho21 scaled by c and rho12 by conj(c).
struct QubitThermalParams {
  double mu = 0;
  double eps = 0;
  Complex c = 1;
};

// Generator with population rate u and coherence decay x, rotation omega.
struct SemigroupParams {
  double u = 0;
  double x = 0;
  double omega = 0;
  double eps = 0;
};

enum class Region { NonThermal, ThermalNonMarkovian, Markovian };

struct Classification {
  Region region = Region::NonThermal;
  bool boundary = false;
  double thermal_residual = 0;  // (1 - eps mu)(1 - mu) - |c|^2
  double markov_residual = 0;   // 1 - mu(1 + eps) - |c|^2
};

const char* to_string(Region r);

bool is_thermal(const QubitThermalParams& p, double tol = 1e-9);
bool is_markovian(const QubitThermalParams& p, double tol = 1e-9);
Classification classify(const QubitThermalParams& p, double tol = 1e-9);

Superoperator superoperator_of(const QubitThermalParams& p);
Superoperator generator_of(const SemigroupParams& sp);
QubitThermalParams semigroup_element(const SemigroupParams& sp, double t);

struct Composite {
  QubitThermalParams params;
  // mu3 vanished, so eps3 was inherited from the second factor.
  bool degenerate = false;
};

// First apply p2, then p1.
Composite compose(const QubitThermalParams& p1, const QubitThermalParams& p2);

struct PsiValue {
  double mu;
  Complex c;
};

PsiValue psi_map(const Superoperator& phi);

// Equal-temperature composition law on (mu, c).
PsiValue compose_psi(const PsiValue& a, const PsiValue& b, double eps);

double thermal_radius(double mu, double eps);
double markov_radius(double mu, double eps);
// t(mu) = -ln(1 - mu(1 + eps)) / (1 + eps), per unit rate; complex past mu = 1/(1+eps).
Complex complex_time(double mu, double eps);

struct RegionPoint {
  double mu;
  Complex c;
};

struct RegionSample {
  double eps;
  std::vector<RegionPoint> markovian;
  std::vector<RegionPoint> thermal;
};

// Boundary surfaces of both cones on a resolution x resolution (mu, phase) grid.
RegionSample mto_region_sample(double eps, int resolution);

// sup over the thermal region of the (mu, |c|) distance to the Markovian region.
double markov_gap(double eps, int resolution = 2000);

}  // namespace thermo::qubit
