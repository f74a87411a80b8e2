#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace granulite {

// Runs fn(begin, end) over contiguous chunks. Chunks write disjoint outputs, so the
// result does not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Fn&& fn) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  if (threads <= 1 || n < 4096) {
    fn(begin, end);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(threads, n);
  std::vector<std::jthread> pool;
  pool.reserve(chunks - 1);
  const std::size_t step = (n + chunks - 1) / chunks;
  for (std::size_t c = 1; c < chunks; ++c) {
    const std::size_t lo = begin + c * step, hi = std::min(end, lo + step);
    if (lo < hi) pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  fn(begin, std::min(end, begin + step));
}

// Sum with a fixed blocking independent of threads: block partials are added in order.
template <typename Fn>
double blocked_sum(std::size_t n, unsigned threads, Fn&& term) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(0, blocks, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t b = lo; b < hi; ++b) {
      double s = 0.0;
      const std::size_t end = std::min(n, (b + 1) * kBlock);
      for (std::size_t i = b * kBlock; i < end; ++i) s += term(i);
      partial[b] = s;
    }
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace granulite
