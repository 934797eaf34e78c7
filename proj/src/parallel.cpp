#include "nsm/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace nsm {

namespace {
std::atomic<std::size_t> g_thread_override{0};
}

void set_thread_override(std::size_t n) { g_thread_override.store(n); }

std::size_t thread_count() {
  const std::size_t override = g_thread_override.load();
  if (override > 0) return override;
  if (const char* env = std::getenv("NSM_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<std::size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace nsm
