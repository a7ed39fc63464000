#pragma once

#include "thermo/core.hpp"

#include <random>

namespace testing_support {

using thermo::Complex;
using thermo::ComplexMatrix;
using thermo::RealMatrix;
using thermo::RealVector;

inline RealVector random_positive(std::mt19937_64& rng, int n, double lo = 0.05) {
  std::uniform_real_distribution<double> u(lo, 1.0);
  RealVector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v / v.sum();
}

// Uniform on the simplex via normalised exponentials.
inline RealVector random_simplex(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> e(1.0);
  RealVector v(n);
  for (int i = 0; i < n; ++i) v[i] = e(rng);
  return v / v.sum();
}

inline ComplexMatrix random_complex(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
  const ComplexMatrix a = random_complex(rng, n, n, scale);
  return 0.5 * (a + a.adjoint());
}

inline ComplexMatrix random_density(std::mt19937_64& rng, int n) {
  const ComplexMatrix a = random_complex(rng, n, n);
  ComplexMatrix r = a * a.adjoint();
  return r / r.trace();
}

}  // namespace testing_support
