#include "tsp/sim/rng.hpp"

namespace tsp {

namespace {
constexpr uint32_t kChannelUniform = 0u << 16;
constexpr uint32_t kChannelNormal = 1u << 16;

simd::CounterBase make_base(uint64_t seed, uint64_t stream, uint32_t tag) {
  simd::CounterBase b;
  b.k0 = static_cast<uint32_t>(seed);
  b.k1 = static_cast<uint32_t>(seed >> 32);
  b.tag = tag;
  b.c2 = static_cast<uint32_t>(stream);
  b.c3 = static_cast<uint32_t>(stream >> 32);
  return b;
}
}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      ubase_(make_base(seed, stream_id, kChannelUniform)),
      nbase_(make_base(seed, stream_id, kChannelNormal)) {}

void RngStream::refill_uniform() {
  simd::active_kernels().uniforms(ubase_, ublock_, kBuf / 2, ubuf_.data());
  ublock_ += kBuf / 2;
  upos_ = 0;
}

void RngStream::refill_normal() {
  simd::active_kernels().normals(nbase_, nblock_, kBuf / 2, nbuf_.data());
  nblock_ += kBuf / 2;
  npos_ = 0;
}

}  // namespace tsp
