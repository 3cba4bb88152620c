#pragma once

#include <cstdint>
#include <vector>

namespace csgrad {

// Dense d-dimensional real signal.  Entries are expected to be finite;
// producers (oracles, transforms, parsers) are responsible for that.
using DenseSignal = std::vector<double>;

struct SparseEntry {
  std::uint32_t index = 0;
  double value = 0.0;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Compressed form of a signal: entries sorted by index, indices distinct
// and < dim.  Values may be explicit zeros only when a projection kept a
// zero entry; consumers must not rely on value != 0.
struct SparseSignal {
  std::uint32_t dim = 0;
  std::vector<SparseEntry> entries;
  friend bool operator==(const SparseSignal&, const SparseSignal&) = default;
};

// Sorted set of distinct coordinate indices.
using IndexSet = std::vector<std::uint32_t>;

double l1_norm(const DenseSignal& x);
double l2_norm(const DenseSignal& x);
double squared_l2_norm(const DenseSignal& x);
double linf_norm(const DenseSignal& x);
double dot(const DenseSignal& a, const DenseSignal& b);
bool is_zero(const DenseSignal& x);

DenseSignal subtract(const DenseSignal& a, const DenseSignal& b);
DenseSignal scaled(const DenseSignal& x, double c);
// x + c * y
DenseSignal add_scaled(const DenseSignal& x, double c, const DenseSignal& y);

// Sparsity level sp(x) = |x|_1^2 / (|x|_2^2 * d), in (0, 1]; 1/d for a
// 1-sparse vector and 1 exactly when all magnitudes are equal.
// Throws std::domain_error for the zero vector.
double sparsity_level(const DenseSignal& x);

// Indices of the k largest-magnitude entries (all of them when k >= d).
// Ties resolve to the lowest index, so the result is identical across
// platforms and sort implementations.  Sorted ascending.
IndexSet principal_support(const DenseSignal& x, std::size_t k);

// Best-k approximation: the (up to) k largest-magnitude entries, zeros
// dropped, same tie rule as principal_support.
SparseSignal best_k(const DenseSignal& x, std::size_t k);

// Indices of the nonzero entries.
IndexSet support(const DenseSignal& x);

// Keeps x on s, zero elsewhere.  Throws std::out_of_range when an index
// exceeds the dimension.
DenseSignal project(const DenseSignal& x, const IndexSet& s);

DenseSignal densify(const SparseSignal& s);

}  // namespace csgrad
