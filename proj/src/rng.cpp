#include "csgrad/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace csgrad::rng {

std::vector<std::uint32_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k,
                                                      Stream& stream) {
  if (k > n)
    throw std::invalid_argument(
        "sample_without_replacement: k exceeds population");
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + stream.next_below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace csgrad::rng
