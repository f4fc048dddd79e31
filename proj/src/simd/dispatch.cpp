#include "tsp/simd/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace tsp::simd {

#ifndef TSP_HAVE_AVX2
const Kernels* avx2_kernels_compiled() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const Kernels* pick_default() {
  const char* env = std::getenv("TSP_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
  const Kernels* v = avx2_kernels_compiled();
  if (v && cpu_has_avx2()) return v;
  return &scalar_kernels();
}

std::atomic<const Kernels*>& slot() {
  static std::atomic<const Kernels*> s{pick_default()};
  return s;
}

}  // namespace

const Kernels& active_kernels() { return *slot().load(std::memory_order_relaxed); }

bool force_backend(Backend b) {
  if (b == Backend::Scalar) {
    slot().store(&scalar_kernels());
    return true;
  }
  const Kernels* v = avx2_kernels_compiled();
  if (!v || !cpu_has_avx2()) return false;
  slot().store(v);
  return true;
}

}  // namespace tsp::simd
