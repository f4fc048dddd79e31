#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "tsp/simd/dispatch.hpp"

namespace tsp {

// Counter-based stream: Philox4x32-10 keyed by seed, counter carries the
// stream id and a channel (uniforms and normals are drawn from separate
// channels so their consumption order never interacts).
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  double uniform() {
    if (upos_ == kBuf) refill_uniform();
    return ubuf_[upos_++];
  }
  double normal() {
    if (npos_ == kBuf) refill_normal();
    return nbuf_[npos_++];
  }
  double exponential() { return -std::log(uniform()); }

 private:
  static constexpr size_t kBuf = 32;
  void refill_uniform();
  void refill_normal();

  uint64_t seed_, stream_id_;
  simd::CounterBase ubase_, nbase_;
  uint64_t ublock_ = 0, nblock_ = 0;
  size_t upos_ = kBuf, npos_ = kBuf;
  alignas(32) std::array<double, kBuf> ubuf_{};
  alignas(32) std::array<double, kBuf> nbuf_{};
};

}  // namespace tsp
