#pragma once

#include <cstddef>

// Batched kernels over structure-of-arrays point sets: coordinate j of point k
// lives at lanes[j * stride + k].
namespace thermo::simd {

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);
bool avx2_supported();
// Chosen once: AVX2+FMA when the CPU has it, unless THERMO_SIMD=scalar.
Isa active_isa();
// Overrides the runtime choice (tests); Avx2 is ignored when unsupported.
void force_isa(Isa isa);

// x_k <- M x_k for every point, M row-major n x n, n <= 8.
void apply_matrix(const double* m, int n, double* lanes, std::size_t stride, std::size_t count);
// out[k] = min_h (bounds[h] - normals[h] . x_k), normals row-major nh x n.
void min_slack(const double* normals, const double* bounds, int nh, int n, const double* lanes, std::size_t stride,
               std::size_t count, double* out);

namespace scalar {
void apply_matrix(const double* m, int n, double* lanes, std::size_t stride, std::size_t count);
void min_slack(const double* normals, const double* bounds, int nh, int n, const double* lanes, std::size_t stride,
               std::size_t count, double* out);
}  // namespace scalar

namespace avx2 {
void apply_matrix(const double* m, int n, double* lanes, std::size_t stride, std::size_t count);
void min_slack(const double* normals, const double* bounds, int nh, int n, const double* lanes, std::size_t stride,
               std::size_t count, double* out);
}  // namespace avx2

constexpr int kMaxDim = 8;

}  // namespace thermo::simd
