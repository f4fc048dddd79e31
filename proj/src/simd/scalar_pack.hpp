#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace tsp::simd::detail {

struct ScalarPack {
  using F = double;
  using U = uint64_t;
  using M = bool;
  using Tail = ScalarPack;
  static constexpr int width = 1;

  static F splat(double v) { return v; }
  static U splat_u(uint64_t v) { return v; }
  static U bits(F x) {
    U u;
    std::memcpy(&u, &x, sizeof u);
    return u;
  }
  static F from_bits(U u) {
    F x;
    std::memcpy(&x, &u, sizeof x);
    return x;
  }
  static F round(F x) { return std::nearbyint(x); }
  static F sqrt(F x) { return std::sqrt(x); }
  static F select(M m, F a, F b) { return m ? a : b; }
  static M eq(U a, U b) { return a == b; }
  static U mul32(U a, U b) { return (a & 0xffffffffULL) * (b & 0xffffffffULL); }
  static F load(const double* p) { return *p; }
  static void store(double* p, F v) { *p = v; }
  static U load_u(const uint64_t* p) { return *p; }
  static void store_u(uint64_t* p, U v) { *p = v; }
};

}  // namespace tsp::simd::detail
