#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace musielak {

/// Worker cap: MUSIELAK_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(begin, end) over [0, n) split into fixed-size blocks. Blocks are
/// distributed over worker_count() threads; the block layout does not depend
/// on the thread count.
void parallel_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Sum of term(i) over [0, n). Per-block partial sums are added in block
/// order, so the result is identical for any thread count.
template <class F>
double parallel_sum(std::size_t n, F&& term);

/// Two sums at once, same ordering guarantee.
template <class F>
std::array<double, 2> parallel_sum2(std::size_t n, F&& term);

inline constexpr std::size_t kBlock = 4096;

template <class F>
double parallel_sum(std::size_t n, F&& term) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> part(nb, 0.0);
  parallel_blocks(n, [&](std::size_t b, std::size_t e) {
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += term(i);
    part[b / kBlock] = s;
  });
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

template <class F>
std::array<double, 2> parallel_sum2(std::size_t n, F&& term) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  std::vector<std::array<double, 2>> part(nb, {0.0, 0.0});
  parallel_blocks(n, [&](std::size_t b, std::size_t e) {
    std::array<double, 2> s{0.0, 0.0};
    for (std::size_t i = b; i < e; ++i) {
      auto t = term(i);
      s[0] += t[0];
      s[1] += t[1];
    }
    part[b / kBlock] = s;
  });
  std::array<double, 2> s{0.0, 0.0};
  for (auto& v : part) s[0] += v[0], s[1] += v[1];
  return s;
}

}  // namespace musielak
