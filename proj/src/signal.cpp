#include "csgrad/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csgrad {

double l1_norm(const DenseSignal& x) {
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return s;
}

double l2_norm(const DenseSignal& x) { return std::sqrt(squared_l2_norm(x)); }

double squared_l2_norm(const DenseSignal& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double linf_norm(const DenseSignal& x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::fabs(v));
  return s;
}

double dot(const DenseSignal& a, const DenseSignal& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool is_zero(const DenseSignal& x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

DenseSignal subtract(const DenseSignal& a, const DenseSignal& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("subtract: length mismatch");
  DenseSignal out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

DenseSignal scaled(const DenseSignal& x, double c) {
  DenseSignal out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = c * x[i];
  return out;
}

DenseSignal add_scaled(const DenseSignal& x, double c, const DenseSignal& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("add_scaled: length mismatch");
  DenseSignal out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + c * y[i];
  return out;
}

double sparsity_level(const DenseSignal& x) {
  const double n1 = l1_norm(x);
  const double n2sq = squared_l2_norm(x);
  if (n2sq == 0.0)
    throw std::domain_error("sparsity_level: undefined for the zero vector");
  return n1 * n1 / (n2sq * static_cast<double>(x.size()));
}

IndexSet principal_support(const DenseSignal& x, std::size_t k) {
  const std::size_t d = x.size();
  const std::size_t m = std::min(k, d);
  IndexSet idx(d);
  std::iota(idx.begin(), idx.end(), 0u);
  const auto larger = [&x](std::uint32_t a, std::uint32_t b) {
    const double ma = std::fabs(x[a]);
    const double mb = std::fabs(x[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  if (m < d)
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m),
                     idx.end(), larger);
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

SparseSignal best_k(const DenseSignal& x, std::size_t k) {
  SparseSignal out;
  out.dim = static_cast<std::uint32_t>(x.size());
  for (std::uint32_t j : principal_support(x, k))
    if (x[j] != 0.0) out.entries.push_back({j, x[j]});
  return out;
}

IndexSet support(const DenseSignal& x) {
  IndexSet s;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] != 0.0) s.push_back(static_cast<std::uint32_t>(j));
  return s;
}

DenseSignal project(const DenseSignal& x, const IndexSet& s) {
  DenseSignal out(x.size(), 0.0);
  for (std::uint32_t j : s) {
    if (j >= x.size()) throw std::out_of_range("project: index out of range");
    out[j] = x[j];
  }
  return out;
}

DenseSignal densify(const SparseSignal& s) {
  DenseSignal out(s.dim, 0.0);
  for (const SparseEntry& e : s.entries) {
    if (e.index >= s.dim)
      throw std::out_of_range("densify: index out of range");
    out[e.index] = e.value;
  }
  return out;
}

}  // namespace csgrad
