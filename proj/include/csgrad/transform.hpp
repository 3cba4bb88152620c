#pragma once

#include <cstdint>

#include "csgrad/signal.hpp"

namespace csgrad {

enum class BaseTransformKind : std::uint8_t { Wht = 0, Dct = 1 };

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

bool is_pow2(std::size_t n);

// Smallest power of two >= n (n >= 1).
std::size_t pow2_ceil(std::size_t n);

// Orthonormal Walsh-Hadamard transform, O(d log d) butterflies with the
// 1/sqrt(2) factor applied per stage so every stage is itself orthonormal.
// The matrix is symmetric orthogonal: fwht(fwht(x)) == x.
// Throws std::invalid_argument unless dim(x) is a power of two.
DenseSignal fwht(DenseSignal x);

// Orthonormal DCT-II matrix, dense reference for small dimensions only.
// Throws std::length_error for d > 4096.
DenseMatrix dct_reference(std::size_t d);

// Zero-pads to the next power-of-two dimension; identity when the
// dimension already is one.
DenseSignal pad_to_pow2(const DenseSignal& x);

// First d entries; inverse of pad_to_pow2 on the original range.
DenseSignal truncate(const DenseSignal& x, std::size_t d);

}  // namespace csgrad
