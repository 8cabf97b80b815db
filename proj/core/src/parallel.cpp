#include "divgrad/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace divgrad {

namespace {

std::atomic<std::size_t> g_override{0};

std::size_t default_workers() noexcept {
  if (const char* env = std::getenv("DIVGRAD_THREADS")) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec == std::errc{} && v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace

std::size_t worker_count() noexcept {
  const std::size_t o = g_override.load(std::memory_order_relaxed);
  return o != 0 ? o : default_workers();
}

void set_worker_count(std::size_t n) noexcept { g_override.store(n, std::memory_order_relaxed); }

}  // namespace divgrad
