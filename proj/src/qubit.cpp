#include "thermo/qubit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace thermo::qubit {

const char* to_string(Region r) {
  switch (r) {
    case Region::NonThermal: return "non-thermal";
    case Region::ThermalNonMarkovian: return "thermal-non-markovian";
    case Region::Markovian: return "markovian";
  }
  return "?";
}

namespace {

void require_finite_params(const QubitThermalParams& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.eps) || !std::isfinite(p.c.real()) || !std::isfinite(p.c.imag()))
    throw InvalidInput("qubit parameters must be finite");
}

// Residuals written so that exact boundary cases stay exact in floating point.
double thermal_residual(const QubitThermalParams& p) { return (1 - p.eps * p.mu) * (1 - p.mu) - std::norm(p.c); }
double markov_residual(const QubitThermalParams& p) { return (1 - p.mu) - p.eps * p.mu - std::norm(p.c); }

bool in_unit(double v, double tol) { return v >= -tol && v <= 1 + tol; }

}  // namespace

bool is_thermal(const QubitThermalParams& p, double tol) {
  require_finite_params(p);
  return in_unit(p.mu, tol) && in_unit(p.eps, tol) && thermal_residual(p) >= -tol;
}

bool is_markovian(const QubitThermalParams& p, double tol) {
  return is_thermal(p, tol) && markov_residual(p) >= -tol;
}

Classification classify(const QubitThermalParams& p, double tol) {
  Classification c;
  c.thermal_residual = thermal_residual(p);
  c.markov_residual = markov_residual(p);
  if (!is_thermal(p, tol)) {
    c.region = Region::NonThermal;
    c.boundary = c.thermal_residual >= -tol && c.thermal_residual <= tol;
  } else if (c.markov_residual >= -tol) {
    c.region = Region::Markovian;
    c.boundary = c.markov_residual <= tol;
  } else {
    c.region = Region::ThermalNonMarkovian;
    c.boundary = c.thermal_residual <= tol;
  }
  return c;
}

Superoperator superoperator_of(const QubitThermalParams& p) {
  if (!is_thermal(p)) throw InvalidInput("parameters violate the thermal-operation bound");
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1 - p.eps * p.mu;
  m(0, 3) = p.mu;
  m(1, 1) = p.c;
  m(2, 2) = std::conj(p.c);
  m(3, 0) = p.eps * p.mu;
  m(3, 3) = 1 - p.mu;
  return Superoperator(m);
}

Superoperator generator_of(const SemigroupParams& sp) {
  if (!std::isfinite(sp.u) || !std::isfinite(sp.x) || !std::isfinite(sp.omega) || !std::isfinite(sp.eps))
    throw InvalidInput("generator parameters must be finite");
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = -sp.eps * sp.u;
  m(0, 3) = sp.u;
  m(1, 1) = Complex(-sp.x, -sp.omega);
  m(2, 2) = Complex(-sp.x, sp.omega);
  m(3, 0) = sp.eps * sp.u;
  m(3, 3) = -sp.u;
  return Superoperator(m);
}

QubitThermalParams semigroup_element(const SemigroupParams& sp, double t) {
  if (!(t >= 0) || !std::isfinite(t)) throw InvalidInput("time must be nonnegative and finite");
  if (sp.u < 0 || sp.eps < 0 || sp.eps > 1) throw InvalidInput("need u >= 0 and eps in [0, 1]");
  if (2 * sp.x < sp.u * (1 + sp.eps) - 1e-12) throw InvalidInput("generator violates 2x >= u(1 + eps)");
  QubitThermalParams p;
  p.eps = sp.eps;
  p.mu = -std::expm1(-t * sp.u * (1 + sp.eps)) / (1 + sp.eps);
  p.c = std::exp(Complex(-sp.x * t, -sp.omega * t));
  return p;
}

Composite compose(const QubitThermalParams& p1, const QubitThermalParams& p2) {
  if (!is_thermal(p1) || !is_thermal(p2)) throw InvalidInput("both factors must be thermal");
  Composite r;
  const double mu3 = p1.mu + p2.mu - p1.mu * p2.mu * (1 + p1.eps);
  const double emu3 = p1.eps * p1.mu + p2.eps * p2.mu - p1.mu * p2.mu * (1 + p1.eps) * p2.eps;
  r.params.mu = mu3;
  r.params.c = p1.c * p2.c;
  if (std::abs(mu3) <= 1e-15) {
    r.params.eps = p2.eps;
    r.degenerate = true;
  } else {
    r.params.eps = emu3 / mu3;
  }
  return r;
}

PsiValue psi_map(const Superoperator& phi) {
  if (phi.dim() != 2) throw InvalidInput("psi map needs a qubit superoperator");
  return {phi.matrix()(0, 3).real(), phi.matrix()(1, 1)};
}

PsiValue compose_psi(const PsiValue& a, const PsiValue& b, double eps) {
  return {a.mu + b.mu - a.mu * b.mu * (1 + eps), a.c * b.c};
}

double thermal_radius(double mu, double eps) { return std::sqrt(std::max(0.0, (1 - eps * mu) * (1 - mu))); }

double markov_radius(double mu, double eps) { return std::sqrt(std::max(0.0, (1 - mu) - eps * mu)); }

Complex complex_time(double mu, double eps) {
  const double arg = 1 - mu * (1 + eps);
  if (arg == 0) return Complex(kInf, 0);
  const Complex l = std::log(Complex(arg, 0.0));
  return -l / (1 + eps);
}

RegionSample mto_region_sample(double eps, int resolution) {
  if (!(eps > 0 && eps < 1)) throw InvalidInput("eps must lie in (0, 1)");
  if (resolution < 2) throw InvalidInput("resolution must be at least 2");
  RegionSample s;
  s.eps = eps;
  const double mu_star = 1 / (1 + eps);
  for (int i = 0; i < resolution; ++i) {
    const double f = static_cast<double>(i) / (resolution - 1);
    for (int k = 0; k < resolution; ++k) {
      const Complex ph = std::polar(1.0, 2 * std::numbers::pi * k / resolution);
      const double mm = f * mu_star;
      s.markovian.push_back({mm, markov_radius(mm, eps) * ph});
      s.thermal.push_back({f, thermal_radius(f, eps) * ph});
    }
  }
  return s;
}

double markov_gap(double eps, int resolution) {
  if (!(eps >= 0 && eps < 1)) throw InvalidInput("eps must lie in [0, 1)");
  const double k = 1 + eps;
  const int fine = 4 * resolution;
  // Upper boundary of the Markovian region parametrised by radius.
  std::vector<std::pair<double, double>> mk;
  for (int i = 0; i <= fine; ++i) {
    const double r = static_cast<double>(i) / fine;
    mk.emplace_back((1 - r * r) / k, r);
  }
  auto dist = [&](double mu, double r) {
    if (mu <= 1 / k && r <= markov_radius(mu, eps)) return 0.0;
    double best = kInf;
    for (const auto& q : mk) best = std::min(best, std::hypot(mu - q.first, r - q.second));
    return best;
  };
  double gap = 0;
  for (int i = 0; i <= resolution; ++i) {
    const double s = static_cast<double>(i) / resolution;
    const double mu = 1 - s * s;
    gap = std::max(gap, dist(mu, thermal_radius(mu, eps)));
    gap = std::max(gap, dist(mu, 0.0));
  }
  return gap;
}

}  // namespace thermo::qubit
