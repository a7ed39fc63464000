#include "thermo/simd.hpp"

#include <algorithm>
#include <limits>

namespace thermo::simd::scalar {

void apply_matrix(const double* m, int n, double* lanes, std::size_t stride, std::size_t count) {
  double x[kMaxDim];
  for (std::size_t k = 0; k < count; ++k) {
    for (int j = 0; j < n; ++j) x[j] = lanes[j * stride + k];
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += m[i * n + j] * x[j];
      lanes[i * stride + k] = s;
    }
  }
}

void min_slack(const double* normals, const double* bounds, int nh, int n, const double* lanes, std::size_t stride,
               std::size_t count, double* out) {
  for (std::size_t k = 0; k < count; ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (int h = 0; h < nh; ++h) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += normals[h * n + j] * lanes[j * stride + k];
      best = std::min(best, bounds[h] - s);
    }
    out[k] = best;
  }
}

}  // namespace thermo::simd::scalar
