#include "nsm/rng.hpp"

#include <algorithm>

#include "nsm/error.hpp"

namespace nsm {

std::vector<std::uint32_t> sample_without_replacement(std::size_t n,
                                                      std::size_t count,
                                                      Rng& rng) {
  if (count > n)
    raise(errc::bad_params, "cannot sample " + std::to_string(count) +
                                " of " + std::to_string(n) + " items");
  std::vector<std::uint32_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace nsm
