#include "batch_impl.hpp"
#include "scalar_pack.hpp"

namespace tsp::simd {

namespace {
using detail::ScalarPack;

void philox_s(const CounterBase& b, uint64_t first, size_t n, uint32_t* out) {
  detail::philox_batch<ScalarPack>(b, first, n, out);
}
void uniforms_s(const CounterBase& b, uint64_t first, size_t n, double* out) {
  detail::uniform_batch<ScalarPack>(b, first, n, out);
}
void normals_s(const CounterBase& b, uint64_t first, size_t n, double* out) {
  detail::normal_batch<ScalarPack>(b, first, n, out);
}
void log_s(const double* in, double* out, size_t n) { detail::log_batch<ScalarPack>(in, out, n); }
void sincos_s(const double* u, double* c, double* s, size_t n) {
  detail::sincos_batch<ScalarPack>(u, c, s, n);
}
}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{Backend::Scalar, "scalar", philox_s, uniforms_s, normals_s, log_s, sincos_s};
  return k;
}

}  // namespace tsp::simd
