#pragma once

// Batch drivers shared by the scalar and AVX2 translation units.

#include <cstdint>

#include "tsp/simd/dispatch.hpp"
#include "tsp/simd/vecmath.hpp"

namespace tsp::simd::detail {

template <class P>
struct BlockWords {
  typename P::U x0, x1, x2, x3;
};

template <class P>
BlockWords<P> philox_lanes(const CounterBase& base, uint64_t first_block) {
  using U = typename P::U;
  alignas(32) uint64_t c0[P::width], c1[P::width];
  for (int j = 0; j < P::width; ++j) {
    uint64_t b = first_block + static_cast<uint64_t>(j);
    c0[j] = b & 0xffffffffULL;
    c1[j] = ((b >> 32) & 0xffffffffULL) | base.tag;
  }
  BlockWords<P> w{P::load_u(c0), P::load_u(c1), P::splat_u(base.c2), P::splat_u(base.c3)};
  U k0 = P::splat_u(base.k0), k1 = P::splat_u(base.k1);
  philox10<P>(w.x0, w.x1, w.x2, w.x3, k0, k1);
  return w;
}

template <class P>
void philox_batch(const CounterBase& base, uint64_t first_block, size_t nblocks, uint32_t* out) {
  size_t b = 0;
  alignas(32) uint64_t t0[P::width], t1[P::width], t2[P::width], t3[P::width];
  for (; b + P::width <= nblocks; b += P::width) {
    auto w = philox_lanes<P>(base, first_block + b);
    P::store_u(t0, w.x0);
    P::store_u(t1, w.x1);
    P::store_u(t2, w.x2);
    P::store_u(t3, w.x3);
    for (int j = 0; j < P::width; ++j) {
      uint32_t* o = out + 4 * (b + j);
      o[0] = static_cast<uint32_t>(t0[j]);
      o[1] = static_cast<uint32_t>(t1[j]);
      o[2] = static_cast<uint32_t>(t2[j]);
      o[3] = static_cast<uint32_t>(t3[j]);
    }
  }
  if (b < nblocks) {
    using S = typename P::Tail;
    philox_batch<S>(base, first_block + b, nblocks - b, out + 4 * b);
  }
}

template <class P>
void uniform_batch(const CounterBase& base, uint64_t first_block, size_t nblocks, double* out) {
  size_t b = 0;
  alignas(32) double u0[P::width], u1[P::width];
  for (; b + P::width <= nblocks; b += P::width) {
    auto w = philox_lanes<P>(base, first_block + b);
    P::store(u0, words_to_uniform<P>(w.x0, w.x1));
    P::store(u1, words_to_uniform<P>(w.x2, w.x3));
    for (int j = 0; j < P::width; ++j) {
      out[2 * (b + j)] = u0[j];
      out[2 * (b + j) + 1] = u1[j];
    }
  }
  if (b < nblocks) {
    using S = typename P::Tail;
    uniform_batch<S>(base, first_block + b, nblocks - b, out + 2 * b);
  }
}

template <class P>
void box_muller(typename P::F u1, typename P::F u2, typename P::F& z0, typename P::F& z1) {
  using F = typename P::F;
  F rad = P::sqrt(P::splat(-2.0) * log_pos<P>(u1));
  F c, s;
  sincos_turns<P>(u2, c, s);
  z0 = rad * c;
  z1 = rad * s;
}

template <class P>
void normal_batch(const CounterBase& base, uint64_t first_block, size_t nblocks, double* out) {
  size_t b = 0;
  alignas(32) double z0[P::width], z1[P::width];
  for (; b + P::width <= nblocks; b += P::width) {
    auto w = philox_lanes<P>(base, first_block + b);
    typename P::F a, c;
    box_muller<P>(words_to_uniform<P>(w.x0, w.x1), words_to_uniform<P>(w.x2, w.x3), a, c);
    P::store(z0, a);
    P::store(z1, c);
    for (int j = 0; j < P::width; ++j) {
      out[2 * (b + j)] = z0[j];
      out[2 * (b + j) + 1] = z1[j];
    }
  }
  if (b < nblocks) {
    using S = typename P::Tail;
    normal_batch<S>(base, first_block + b, nblocks - b, out + 2 * b);
  }
}

template <class P>
void log_batch(const double* in, double* out, size_t n) {
  size_t i = 0;
  for (; i + P::width <= n; i += P::width) P::store(out + i, log_pos<P>(P::load(in + i)));
  if (i < n) log_batch<typename P::Tail>(in + i, out + i, n - i);
}

template <class P>
void sincos_batch(const double* u, double* c, double* s, size_t n) {
  size_t i = 0;
  for (; i + P::width <= n; i += P::width) {
    typename P::F cv, sv;
    sincos_turns<P>(P::load(u + i), cv, sv);
    P::store(c + i, cv);
    P::store(s + i, sv);
  }
  if (i < n) sincos_batch<typename P::Tail>(u + i, c + i, s + i, n - i);
}

}  // namespace tsp::simd::detail
