#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "tsp/sim/rng.hpp"

namespace tsp {

struct RunOptions {
  uint64_t seed = 1;
  int threads = 1;
  long block = 1024;
  uint64_t stream_offset = 0;  // path i uses stream stream_offset + i
};

// Paths are cut into fixed blocks; each block fills its own accumulator in path
// order and blocks are merged in index order, so the result does not depend on
// the thread count. Acc needs merge(const Acc&); fn(i, rng, acc) runs path i.
template <class Acc, class Fn>
Acc run_blocks(long n, const RunOptions& opt, const Acc& proto, Fn&& fn) {
  const long block = std::max(1L, opt.block);
  const long nblocks = (n + block - 1) / block;
  std::vector<Acc> parts(static_cast<size_t>(nblocks), proto);
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex fail_mu;
  auto worker = [&]() {
    try {
      while (true) {
        long b = next.fetch_add(1);
        if (b >= nblocks) return;
        Acc& acc = parts[static_cast<size_t>(b)];
        const long lo = b * block, hi = std::min(n, lo + block);
        for (long i = lo; i < hi; ++i) {
          RngStream rng(opt.seed, opt.stream_offset + static_cast<uint64_t>(i));
          fn(i, rng, acc);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(fail_mu);
      if (!failure) failure = std::current_exception();
      next.store(nblocks);
    }
  };
  const int threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(std::max(1L, nblocks))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  Acc total = proto;
  for (const Acc& a : parts) total.merge(a);
  return total;
}

// Sums and cross products of k per-path values over uncensored paths.
struct PathMoments {
  int k = 0;
  long n = 0, censored = 0;
  std::vector<double> sum, cross;  // cross is k x k row-major

  PathMoments() = default;
  explicit PathMoments(int k_) : k(k_), sum(static_cast<size_t>(k_), 0.0), cross(static_cast<size_t>(k_ * k_), 0.0) {}

  void add(const double* v) {
    ++n;
    for (int i = 0; i < k; ++i) {
      sum[static_cast<size_t>(i)] += v[i];
      for (int j = 0; j < k; ++j) cross[static_cast<size_t>(i * k + j)] += v[i] * v[j];
    }
  }
  void add_censored() { ++censored; }
  void merge(const PathMoments& o) {
    n += o.n;
    censored += o.censored;
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += o.sum[i];
    for (size_t i = 0; i < cross.size(); ++i) cross[i] += o.cross[i];
  }
  double mean(int i) const { return n > 0 ? sum[static_cast<size_t>(i)] / n : 0.0; }
  // sample covariance (n - 1 denominator)
  double cov(int i, int j) const {
    if (n < 2) return 0.0;
    double c = (cross[static_cast<size_t>(i * k + j)] - sum[static_cast<size_t>(i)] * sum[static_cast<size_t>(j)] / n) /
               (n - 1);
    return (i == j) ? std::max(0.0, c) : c;
  }
  double stderr_of_mean(int i) const { return n > 0 ? std::sqrt(cov(i, i) / n) : 0.0; }
  // mean(i)/mean(j) with the paired delta-method standard error
  double ratio(int i, int j) const { return mean(i) / mean(j); }
  double ratio_stderr(int i, int j) const {
    const double mi = mean(i), mj = mean(j);
    if (n < 2 || mj == 0.0) return 0.0;
    const double r = mi / mj;
    const double v = (cov(i, i) - 2 * r * cov(i, j) + r * r * cov(j, j)) / (mj * mj * n);
    return std::sqrt(std::max(0.0, v));
  }
  double censored_fraction() const { return (n + censored) > 0 ? double(censored) / double(n + censored) : 0.0; }
};

}  // namespace tsp
