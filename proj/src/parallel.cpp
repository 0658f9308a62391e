#include "musielak/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace musielak {

std::size_t worker_count() {
  if (const char* env = std::getenv("MUSIELAK_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
      // fall through to the default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t nb = (n + kBlock - 1) / kBlock;
  const std::size_t workers = std::min(worker_count(), nb);
  if (workers <= 1) {
    for (std::size_t b = 0; b < nb; ++b) body(b * kBlock, std::min(n, (b + 1) * kBlock));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto work = [&] {
    for (std::size_t b; (b = next.fetch_add(1)) < nb;) {
      try {
        body(b * kBlock, std::min(n, (b + 1) * kBlock));
      } catch (...) {
        std::lock_guard lk(err_mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace musielak
