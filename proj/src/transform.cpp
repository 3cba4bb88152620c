#include "csgrad/transform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csgrad {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t pow2_ceil(std::size_t n) {
  if (n == 0) throw std::invalid_argument("pow2_ceil: n must be positive");
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

DenseSignal fwht(DenseSignal x) {
  const std::size_t d = x.size();
  if (!is_pow2(d))
    throw std::invalid_argument("fwht: dimension must be a power of two");
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  for (std::size_t half = 1; half < d; half <<= 1) {
    for (std::size_t block = 0; block < d; block += half << 1) {
      for (std::size_t j = block; j < block + half; ++j) {
        const double a = x[j];
        const double b = x[j + half];
        x[j] = (a + b) * inv_sqrt2;
        x[j + half] = (a - b) * inv_sqrt2;
      }
    }
  }
  return x;
}

DenseMatrix dct_reference(std::size_t d) {
  if (d == 0) throw std::invalid_argument("dct_reference: d must be positive");
  if (d > 4096)
    throw std::length_error("dct_reference: d > 4096 not supported");
  DenseMatrix b{d, d, std::vector<double>(d * d)};
  const double row_norm = std::sqrt(2.0 / static_cast<double>(d));
  const double dc_norm = row_norm / std::numbers::sqrt2;
  for (std::size_t r = 0; r < d; ++r) {
    const double amp = (r == 0) ? dc_norm : row_norm;
    for (std::size_t c = 0; c < d; ++c) {
      const double arg = std::numbers::pi * static_cast<double>(r) *
                         (2.0 * static_cast<double>(c) + 1.0) /
                         (2.0 * static_cast<double>(d));
      b.at(r, c) = amp * std::cos(arg);
    }
  }
  return b;
}

DenseSignal pad_to_pow2(const DenseSignal& x) {
  const std::size_t target = pow2_ceil(x.size());
  DenseSignal out(target, 0.0);
  std::copy(x.begin(), x.end(), out.begin());
  return out;
}

DenseSignal truncate(const DenseSignal& x, std::size_t d) {
  if (d == 0) throw std::invalid_argument("truncate: d must be positive");
  if (d > x.size())
    throw std::invalid_argument("truncate: d exceeds input dimension");
  return DenseSignal(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d));
}

}  // namespace csgrad
