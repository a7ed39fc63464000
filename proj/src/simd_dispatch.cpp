#include "thermo/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace thermo::simd {

namespace {

Isa detect() {
  const char* env = std::getenv("THERMO_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return Isa::Scalar;
  return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& current() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

void check_dim(int n) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("batched kernels support 1 <= n <= 8");
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return static_cast<Isa>(current().load()); }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
  current().store(static_cast<int>(isa));
}

void apply_matrix(const double* m, int n, double* lanes, std::size_t stride, std::size_t count) {
  check_dim(n);
  if (active_isa() == Isa::Avx2)
    avx2::apply_matrix(m, n, lanes, stride, count);
  else
    scalar::apply_matrix(m, n, lanes, stride, count);
}

void min_slack(const double* normals, const double* bounds, int nh, int n, const double* lanes, std::size_t stride,
               std::size_t count, double* out) {
  check_dim(n);
  if (active_isa() == Isa::Avx2)
    avx2::min_slack(normals, bounds, nh, n, lanes, stride, count, out);
  else
    scalar::min_slack(normals, bounds, nh, n, lanes, stride, count, out);
}

}  // namespace thermo::simd
