#pragma once

// Lane-generic kernels. Each backend supplies a pack traits type P with
//   F (double lanes), U (uint64 lanes), M (lane mask), width,
//   splat, splat_u, bits, from_bits, round, sqrt, select, eq, mul32,
//   load, store, load_u, store_u.
// Scalar and AVX2 instantiate the same code, so results match bit for bit.

#include <cstddef>
#include <cstdint>

namespace tsp::simd::detail {

inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

// Exact for integers of magnitude below 2^51.
inline constexpr double kMagic = 6755399441055744.0;  // 2^52 + 2^51

template <class P>
typename P::F small_int_to_f(typename P::U k) {
  const typename P::F magic = P::splat(kMagic);
  return P::from_bits(k + P::bits(magic)) - magic;
}

template <class P>
typename P::U small_f_to_int(typename P::F q) {
  const typename P::F magic = P::splat(kMagic);
  return P::bits(q + magic) - P::bits(magic);
}

// Natural log for positive normal finite inputs (fdlibm e_log reduction).
template <class P>
typename P::F log_pos(typename P::F x) {
  using F = typename P::F;
  using U = typename P::U;
  const U lo_mask = P::splat_u(0xffffffffULL);
  U bits = P::bits(x);
  U hx = bits >> 32;
  U k = (hx >> 20) - P::splat_u(1023);
  hx = hx & P::splat_u(0x000fffffULL);
  U i = (hx + P::splat_u(0x95f64ULL)) & P::splat_u(0x100000ULL);
  U hi = hx | (i ^ P::splat_u(0x3ff00000ULL));
  F xn = P::from_bits((hi << 32) | (bits & lo_mask));
  k = k + (i >> 20);
  F f = xn - P::splat(1.0);

  const F Lg1 = P::splat(6.666666666666735130e-01);
  const F Lg2 = P::splat(3.999999999940941908e-01);
  const F Lg3 = P::splat(2.857142874366239149e-01);
  const F Lg4 = P::splat(2.222219843214978396e-01);
  const F Lg5 = P::splat(1.818357216161805012e-01);
  const F Lg6 = P::splat(1.531383769920937332e-01);
  const F Lg7 = P::splat(1.479819860511658591e-01);
  const F ln2_hi = P::splat(6.93147180369123816490e-01);
  const F ln2_lo = P::splat(1.90821492927058770002e-10);

  F s = f / (P::splat(2.0) + f);
  F z = s * s;
  F w = z * z;
  F t1 = w * (Lg2 + w * (Lg4 + w * Lg6));
  F t2 = z * (Lg1 + w * (Lg3 + w * (Lg5 + w * Lg7)));
  F R = t2 + t1;
  F hfsq = P::splat(0.5) * f * f;
  F dk = small_int_to_f<P>(k);
  return dk * ln2_hi - ((hfsq - (s * (hfsq + R) + dk * ln2_lo)) - f);
}

template <class P>
typename P::F kernel_sin(typename P::F x) {
  using F = typename P::F;
  const F S1 = P::splat(-1.66666666666666324348e-01);
  const F S2 = P::splat(8.33333333332248946124e-03);
  const F S3 = P::splat(-1.98412698298579493134e-04);
  const F S4 = P::splat(2.75573137070700676789e-06);
  const F S5 = P::splat(-2.50507602534068634195e-08);
  const F S6 = P::splat(1.58969099521155010221e-10);
  F z = x * x;
  F v = z * x;
  F r = S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)));
  return x + v * (S1 + z * r);
}

template <class P>
typename P::F kernel_cos(typename P::F x) {
  using F = typename P::F;
  const F C1 = P::splat(4.16666666666666019037e-02);
  const F C2 = P::splat(-1.38888888888741095749e-03);
  const F C3 = P::splat(2.48015872894767294178e-05);
  const F C4 = P::splat(-2.75573143513906633035e-07);
  const F C5 = P::splat(2.08757232129817482790e-09);
  const F C6 = P::splat(-1.13596475577881948265e-11);
  const F one = P::splat(1.0);
  F z = x * x;
  F r = z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6)))));
  F hz = P::splat(0.5) * z;
  F w = one - hz;
  return w + (((one - w) - hz) + z * r);
}

// cos and sin of 2*pi*u for u in [0,1).
template <class P>
void sincos_turns(typename P::F u, typename P::F& c, typename P::F& s) {
  using F = typename P::F;
  using U = typename P::U;
  F y = u * P::splat(4.0);
  F q = P::round(y);
  F t = (y - q) * P::splat(1.57079632679489661923);
  F ks = kernel_sin<P>(t);
  F kc = kernel_cos<P>(t);
  U qi = small_f_to_int<P>(q) & P::splat_u(3);
  auto odd = P::eq(qi & P::splat_u(1), P::splat_u(1));
  F a = P::select(odd, ks, kc);
  F b = P::select(odd, kc, ks);
  // cos negative in quadrants 1,2; sin negative in quadrants 2,3
  auto cneg = P::eq((qi + P::splat_u(1)) & P::splat_u(2), P::splat_u(2));
  auto sneg = P::eq(qi & P::splat_u(2), P::splat_u(2));
  c = P::select(cneg, -a, a);
  s = P::select(sneg, -b, b);
}

// Ten Philox4x32 rounds; each uint64 lane carries one 32-bit word.
template <class P>
void philox10(typename P::U& x0, typename P::U& x1, typename P::U& x2, typename P::U& x3,
              typename P::U k0, typename P::U k1) {
  using U = typename P::U;
  const U mask = P::splat_u(0xffffffffULL);
  const U m0 = P::splat_u(kPhiloxM0);
  const U m1 = P::splat_u(kPhiloxM1);
  const U w0 = P::splat_u(kPhiloxW0);
  const U w1 = P::splat_u(kPhiloxW1);
  for (int round = 0; round < 10; ++round) {
    U p0 = P::mul32(x0, m0);
    U p1 = P::mul32(x2, m1);
    U y0 = (p1 >> 32) ^ x1 ^ k0;
    U y1 = p1 & mask;
    U y2 = (p0 >> 32) ^ x3 ^ k1;
    U y3 = p0 & mask;
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 = (k0 + w0) & mask;
    k1 = (k1 + w1) & mask;
  }
}

// 52-bit uniform in (0,1) from two 32-bit words, 26 bits each.
template <class P>
typename P::F words_to_uniform(typename P::U a, typename P::U b) {
  using F = typename P::F;
  F hi = small_int_to_f<P>(a >> 6);
  F lo = small_int_to_f<P>(b >> 6);
  return (hi * P::splat(67108864.0) + lo + P::splat(0.5)) * P::splat(0x1p-52);
}

}  // namespace tsp::simd::detail
