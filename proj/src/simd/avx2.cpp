// Compiled with -mavx2 only; selected at runtime after a CPU check.
#include <immintrin.h>

#include "batch_impl.hpp"
#include "scalar_pack.hpp"

namespace tsp::simd {

namespace detail {

struct F4 {
  __m256d v;
};
struct U4 {
  __m256i v;
};

inline F4 operator+(F4 a, F4 b) { return {_mm256_add_pd(a.v, b.v)}; }
inline F4 operator-(F4 a, F4 b) { return {_mm256_sub_pd(a.v, b.v)}; }
inline F4 operator*(F4 a, F4 b) { return {_mm256_mul_pd(a.v, b.v)}; }
inline F4 operator/(F4 a, F4 b) { return {_mm256_div_pd(a.v, b.v)}; }
inline F4 operator-(F4 a) { return {_mm256_xor_pd(a.v, _mm256_set1_pd(-0.0))}; }

inline U4 operator+(U4 a, U4 b) { return {_mm256_add_epi64(a.v, b.v)}; }
inline U4 operator-(U4 a, U4 b) { return {_mm256_sub_epi64(a.v, b.v)}; }
inline U4 operator&(U4 a, U4 b) { return {_mm256_and_si256(a.v, b.v)}; }
inline U4 operator|(U4 a, U4 b) { return {_mm256_or_si256(a.v, b.v)}; }
inline U4 operator^(U4 a, U4 b) { return {_mm256_xor_si256(a.v, b.v)}; }
inline U4 operator>>(U4 a, int n) { return {_mm256_srl_epi64(a.v, _mm_cvtsi32_si128(n))}; }
inline U4 operator<<(U4 a, int n) { return {_mm256_sll_epi64(a.v, _mm_cvtsi32_si128(n))}; }

struct Avx2Pack {
  using F = F4;
  using U = U4;
  using M = __m256d;
  using Tail = ScalarPack;
  static constexpr int width = 4;

  static F splat(double v) { return {_mm256_set1_pd(v)}; }
  static U splat_u(uint64_t v) { return {_mm256_set1_epi64x(static_cast<long long>(v))}; }
  static U bits(F x) { return {_mm256_castpd_si256(x.v)}; }
  static F from_bits(U u) { return {_mm256_castsi256_pd(u.v)}; }
  static F round(F x) { return {_mm256_round_pd(x.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)}; }
  static F sqrt(F x) { return {_mm256_sqrt_pd(x.v)}; }
  static F select(M m, F a, F b) { return {_mm256_blendv_pd(b.v, a.v, m)}; }
  static M eq(U a, U b) { return _mm256_castsi256_pd(_mm256_cmpeq_epi64(a.v, b.v)); }
  static U mul32(U a, U b) { return {_mm256_mul_epu32(a.v, b.v)}; }
  static F load(const double* p) { return {_mm256_loadu_pd(p)}; }
  static void store(double* p, F v) { _mm256_storeu_pd(p, v.v); }
  static U load_u(const uint64_t* p) { return {_mm256_loadu_si256(reinterpret_cast<const __m256i*>(p))}; }
  static void store_u(uint64_t* p, U v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v.v); }
};

}  // namespace detail

namespace {
using detail::Avx2Pack;

void philox_v(const CounterBase& b, uint64_t first, size_t n, uint32_t* out) {
  detail::philox_batch<Avx2Pack>(b, first, n, out);
}
void uniforms_v(const CounterBase& b, uint64_t first, size_t n, double* out) {
  detail::uniform_batch<Avx2Pack>(b, first, n, out);
}
void normals_v(const CounterBase& b, uint64_t first, size_t n, double* out) {
  detail::normal_batch<Avx2Pack>(b, first, n, out);
}
void log_v(const double* in, double* out, size_t n) { detail::log_batch<Avx2Pack>(in, out, n); }
void sincos_v(const double* u, double* c, double* s, size_t n) {
  detail::sincos_batch<Avx2Pack>(u, c, s, n);
}
}  // namespace

const Kernels* avx2_kernels_compiled() {
  static const Kernels k{Backend::Avx2, "avx2", philox_v, uniforms_v, normals_v, log_v, sincos_v};
  return &k;
}

}  // namespace tsp::simd
