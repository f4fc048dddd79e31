#pragma once

#include <cstddef>
#include <cstdint>

namespace tsp::simd {

enum class Backend { Scalar, Avx2 };

// Counter layout for block b of a stream:
//   ctr = {lo32(b), hi32(b) | tag, c2, c3}, key = {k0, k1}.
struct CounterBase {
  uint32_t k0 = 0, k1 = 0;
  uint32_t tag = 0;
  uint32_t c2 = 0, c3 = 0;
};

struct Kernels {
  Backend backend;
  const char* name;
  // 4 words per block, block-major.
  void (*philox)(const CounterBase& base, uint64_t first_block, size_t nblocks, uint32_t* out);
  // 2 uniforms in (0,1) per block.
  void (*uniforms)(const CounterBase& base, uint64_t first_block, size_t nblocks, double* out);
  // 2 standard normals per block (Box-Muller on the block's two uniforms).
  void (*normals)(const CounterBase& base, uint64_t first_block, size_t nblocks, double* out);
  void (*log)(const double* in, double* out, size_t n);
  // cos(2 pi u), sin(2 pi u) for u in [0,1).
  void (*sincos_turns)(const double* u, double* c, double* s, size_t n);
};

const Kernels& scalar_kernels();
// nullptr when the build lacks the AVX2 translation unit.
const Kernels* avx2_kernels_compiled();
bool cpu_has_avx2();

// Chosen once: TSP_SIMD=scalar forces the scalar path, otherwise AVX2 when available.
const Kernels& active_kernels();
// Test hook; returns false if the requested backend is unavailable.
bool force_backend(Backend b);

}  // namespace tsp::simd
