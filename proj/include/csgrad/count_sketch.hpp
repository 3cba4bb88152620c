#pragma once

#include <cstdint>

#include "csgrad/rng.hpp"
#include "csgrad/signal.hpp"

namespace csgrad {

// Count-sketch operator shape.  The bucket and sign of coordinate j in
// row i are both read off one stateless 64-bit mix of (seed, i, j):
// bucket from the high 32 bits mod cols, sign from bit 0.  Nothing is
// stored, so the operator is reproducible from the params alone.
struct CountSketchParams {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t dim = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const CountSketchParams&,
                         const CountSketchParams&) = default;
};

std::uint32_t cs_bucket(const CountSketchParams& p, std::uint32_t row,
                        std::uint32_t coord);
double cs_sign(const CountSketchParams& p, std::uint32_t row,
               std::uint32_t coord);

struct SketchTable {
  CountSketchParams params;
  std::vector<double> cells;  // rows x cols, row-major
};

// Hashes precomputed once, for the hot loop of the optimizer; produces
// bitwise the same tables and estimates as the free functions below.
class CountSketchOperator {
 public:
  explicit CountSketchOperator(const CountSketchParams& params);

  const CountSketchParams& params() const { return params_; }

  SketchTable compress(const DenseSignal& x) const;

  // Per-coordinate median-of-rows estimate; with an even row count the
  // median is the mean of the two central order statistics.
  DenseSignal estimate(const SketchTable& table) const;

  SparseSignal reconstruct(const SketchTable& table, std::size_t k) const;

 private:
  CountSketchParams params_;
  std::vector<std::uint32_t> buckets_;  // rows x dim
  std::vector<double> signs_;           // rows x dim, +-1
};

// table[i][h_i(j)] += s_i(j) * x_j for every row i and coordinate j.
SketchTable cs_compress(const DenseSignal& x, const CountSketchParams& params);

// Entrywise weighted sum; all tables must share identical params.
SketchTable cs_combine(const std::vector<SketchTable>& tables,
                       const std::vector<double>& weights);

// Top-k of the median estimates, ties to the lowest index.
SparseSignal cs_reconstruct(const SketchTable& table, std::size_t k);

}  // namespace csgrad
