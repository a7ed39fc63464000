// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "thermo/simd.hpp"

#include <limits>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif

namespace thermo::simd::avx2 {

#if defined(__AVX2__) && defined(__FMA__)

void apply_matrix(const double* m, int n, double* lanes, std::size_t stride, std::size_t count) {
  __m256d x[kMaxDim];
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    for (int j = 0; j < n; ++j) x[j] = _mm256_loadu_pd(lanes + j * stride + k);
    for (int i = 0; i < n; ++i) {
      __m256d acc = _mm256_mul_pd(_mm256_set1_pd(m[i * n]), x[0]);
      for (int j = 1; j < n; ++j) acc = _mm256_fmadd_pd(_mm256_set1_pd(m[i * n + j]), x[j], acc);
      _mm256_storeu_pd(lanes + i * stride + k, acc);
    }
  }
  if (k < count) scalar::apply_matrix(m, n, lanes + k, stride, count - k);
}

void min_slack(const double* normals, const double* bounds, int nh, int n, const double* lanes, std::size_t stride,
               std::size_t count, double* out) {
  __m256d x[kMaxDim];
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    for (int j = 0; j < n; ++j) x[j] = _mm256_loadu_pd(lanes + j * stride + k);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    for (int h = 0; h < nh; ++h) {
      __m256d s = _mm256_mul_pd(_mm256_set1_pd(normals[h * n]), x[0]);
      for (int j = 1; j < n; ++j) s = _mm256_fmadd_pd(_mm256_set1_pd(normals[h * n + j]), x[j], s);
      best = _mm256_min_pd(best, _mm256_sub_pd(_mm256_set1_pd(bounds[h]), s));
    }
    _mm256_storeu_pd(out + k, best);
  }
  if (k < count) scalar::min_slack(normals, bounds, nh, n, lanes + k, stride, count - k, out + k);
}

#else

void apply_matrix(const double* m, int n, double* lanes, std::size_t stride, std::size_t count) {
  scalar::apply_matrix(m, n, lanes, stride, count);
}

void min_slack(const double* normals, const double* bounds, int nh, int n, const double* lanes, std::size_t stride,
               std::size_t count, double* out) {
  scalar::min_slack(normals, bounds, nh, n, lanes, stride, count, out);
}

#endif

}  // namespace thermo::simd::avx2
