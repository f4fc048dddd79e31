#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <vector>

#include "tsp/sim/rng.hpp"
#include "tsp/simd/dispatch.hpp"

using namespace tsp;
using simd::CounterBase;

namespace {

// Random123 known-answer vectors for Philox4x32-10.
struct Kat {
  uint32_t ctr[4];
  uint32_t key[2];
  uint32_t out[4];
};
const Kat kKats[] = {
    {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}},
    {{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
     {0xffffffff, 0xffffffff},
     {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}},
    {{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
     {0xa4093822, 0x299f31d0},
     {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}},
};

CounterBase base_for(const Kat& k) {
  CounterBase b;
  b.k0 = k.key[0];
  b.k1 = k.key[1];
  b.tag = 0;
  b.c2 = k.ctr[2];
  b.c3 = k.ctr[3];
  return b;
}

std::vector<const simd::Kernels*> backends() {
  std::vector<const simd::Kernels*> v{&simd::scalar_kernels()};
  if (simd::avx2_kernels_compiled() && simd::cpu_has_avx2()) v.push_back(simd::avx2_kernels_compiled());
  return v;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("philox known answers on every backend") {
  for (const auto* k : backends()) {
    INFO(k->name);
    for (const auto& kat : kKats) {
      uint64_t block = (static_cast<uint64_t>(kat.ctr[1]) << 32) | kat.ctr[0];
      // pad to 5 blocks so the AVX2 body and the scalar tail both run
      std::vector<uint32_t> out(20);
      k->philox(base_for(kat), block, 1, out.data());
      for (int i = 0; i < 4; ++i) CHECK(out[i] == kat.out[i]);
    }
  }
}

TEST_CASE("philox batch equals one-block calls") {
  CounterBase b;
  b.k0 = 123;
  b.k1 = 456;
  b.tag = 1u << 16;
  b.c2 = 7;
  b.c3 = 9;
  for (const auto* k : backends()) {
    std::vector<uint32_t> batch(4 * 11);
    k->philox(b, 1000, 11, batch.data());
    for (size_t i = 0; i < 11; ++i) {
      uint32_t one[4];
      simd::scalar_kernels().philox(b, 1000 + i, 1, one);
      for (int j = 0; j < 4; ++j) CHECK(batch[4 * i + j] == one[j]);
    }
  }
}

TEST_CASE("scalar and avx2 kernels agree bit for bit") {
  const auto* v = simd::avx2_kernels_compiled();
  if (!v || !simd::cpu_has_avx2()) SKIP("no AVX2 on this host");
  const auto& s = simd::scalar_kernels();
  CounterBase b;
  b.k0 = 0xdeadbeef;
  b.k1 = 42;
  b.c2 = 3;
  const size_t nb = 4099;
  std::vector<double> us(2 * nb), uv(2 * nb), ns(2 * nb), nv(2 * nb);
  s.uniforms(b, 17, nb, us.data());
  v->uniforms(b, 17, nb, uv.data());
  s.normals(b, 17, nb, ns.data());
  v->normals(b, 17, nb, nv.data());
  size_t mism = 0;
  for (size_t i = 0; i < 2 * nb; ++i) {
    mism += !same_bits(us[i], uv[i]);
    mism += !same_bits(ns[i], nv[i]);
  }
  CHECK(mism == 0);

  std::vector<double> x, ls(0), lv(0);
  for (int e = -60; e <= 60; ++e)
    for (int j = 0; j < 50; ++j) x.push_back(std::ldexp(1.0 + j / 49.0 * 0.999, e));
  x.push_back(1.0);
  x.push_back(0x1p-53);
  ls.resize(x.size());
  lv.resize(x.size());
  s.log(x.data(), ls.data(), x.size());
  v->log(x.data(), lv.data(), x.size());
  for (size_t i = 0; i < x.size(); ++i) CHECK(same_bits(ls[i], lv[i]));

  std::vector<double> u(1003), cs(u.size()), ss(u.size()), cv(u.size()), sv(u.size());
  for (size_t i = 0; i < u.size(); ++i) u[i] = i / double(u.size());
  s.sincos_turns(u.data(), cs.data(), ss.data(), u.size());
  v->sincos_turns(u.data(), cv.data(), sv.data(), u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    CHECK(same_bits(cs[i], cv[i]));
    CHECK(same_bits(ss[i], sv[i]));
  }
}

TEST_CASE("polynomial log and sincos match libm") {
  const auto& s = simd::scalar_kernels();
  std::vector<double> x;
  for (int e = -53; e <= 40; ++e)
    for (int j = 0; j < 97; ++j) x.push_back(std::ldexp(1.0 + j / 97.0, e));
  std::vector<double> l(x.size());
  s.log(x.data(), l.data(), x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double ref = std::log(x[i]);
    CHECK(std::abs(l[i] - ref) <= 4.5e-16 * std::max(1.0, std::abs(ref)));
  }
  std::vector<double> u(4001), c(u.size()), sn(u.size());
  for (size_t i = 0; i < u.size(); ++i) u[i] = (i + 0.37) / double(u.size());
  s.sincos_turns(u.data(), c.data(), sn.data(), u.size());
  for (size_t i = 0; i < u.size(); ++i) {
    double a = 2.0 * M_PI * u[i];
    CHECK(std::abs(c[i] - std::cos(a)) < 1e-15);
    CHECK(std::abs(sn[i] - std::sin(a)) < 1e-15);
  }
}

TEST_CASE("uniforms stay inside the open unit interval") {
  CounterBase b;
  std::vector<double> u(2 * 4096);
  simd::active_kernels().uniforms(b, 0, 4096, u.data());
  double mean = 0;
  for (double v : u) {
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
    mean += v;
  }
  mean /= u.size();
  CHECK(std::abs(mean - 0.5) < 4 * std::sqrt(1.0 / 12 / u.size()));
}

TEST_CASE("normal stream moments") {
  RngStream r(2024, 5);
  const int n = 400000;
  double m1 = 0, m2 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = r.normal();
    m1 += z;
    m2 += z * z;
    m4 += z * z * z * z;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 4 / std::sqrt(n));
  CHECK(std::abs(m2 - 1) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(m4 - 3) < 4 * std::sqrt(96.0 / n));
}

TEST_CASE("streams are reproducible and distinct") {
  RngStream a(7, 1), b(7, 1), c(7, 2), d(8, 1);
  for (int i = 0; i < 100; ++i) {
    double ua = a.uniform(), ub = b.uniform(), uc = c.uniform(), ud = d.uniform();
    CHECK(ua == ub);
    CHECK(ua != uc);
    CHECK(ua != ud);
  }
}
