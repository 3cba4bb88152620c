#pragma once

#include <cstdint>

#include "csgrad/rng.hpp"
#include "csgrad/signal.hpp"
#include "csgrad/transform.hpp"

namespace csgrad {

// Q compressed measurements of a d-dimensional signal.
using Measurement = std::vector<double>;

// Implicit Q x d sensing matrix: Q distinct rows of an orthogonal base
// transform at the power-of-two augmented dimension, scaled by
// sqrt(d_aug / Q).  Only the row indices and the seed are stored; products
// run through the fast transform.  Immutable after generation.
struct SensingMatrix {
  BaseTransformKind base = BaseTransformKind::Wht;
  std::uint32_t dim = 0;      // d, the public signal dimension
  std::uint32_t dim_aug = 0;  // 2^ceil(log2 d)
  IndexSet rows;              // sorted distinct indices in [0, dim_aug)
  double scale = 1.0;         // sqrt(dim_aug / Q)
  std::uint64_t seed = 0;

  std::size_t measurements() const { return rows.size(); }

  // Phi * u: pad to dim_aug, fast transform, gather the sampled rows,
  // scale.  O(d_aug log d_aug) for the WHT base.
  Measurement apply(const DenseSignal& u) const;

  // Phi^T * v: scatter onto the sampled rows, inverse transform (the WHT
  // is its own inverse), scale, truncate back to dim.  Exact adjoint of
  // apply for every d, including non-powers of two.
  DenseSignal adjoint(const Measurement& v) const;

  friend bool operator==(const SensingMatrix&, const SensingMatrix&) = default;
};

// Samples q distinct row indices uniformly from [0, d_aug) with the
// seeded generator.  Identical (base, d, q, seed) gives identical
// matrices on every platform.  The DCT base is reference-only and limited
// to d_aug <= 4096.
SensingMatrix generate_sensing_matrix(BaseTransformKind base, std::size_t d,
                                      std::size_t q, std::uint64_t seed);

// Wire format, little-endian:
//   offset 0   u8   base kind (0 = WHT, 1 = DCT)
//   offset 1   u8   reserved, zero
//   offset 2   u16  format version (1)
//   offset 4   u32  d
//   offset 8   u32  Q
//   offset 12  u32  low 32 bits of the generation seed
//   offset 16  u32 x Q  row indices, sorted ascending
// Total 16 + 4Q bytes.
std::vector<std::uint8_t> serialize(const SensingMatrix& phi);

// Throws std::runtime_error on malformed payloads (bad length, unknown
// kind or version, out-of-range or unsorted rows).
SensingMatrix deserialize(const std::vector<std::uint8_t>& bytes);

}  // namespace csgrad
