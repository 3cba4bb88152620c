#include "csgrad/count_sketch.hpp"

#include <algorithm>
#include <stdexcept>

namespace csgrad {

namespace {

std::uint64_t hash_cell(const CountSketchParams& p, std::uint32_t row,
                        std::uint32_t coord) {
  return rng::fold(rng::fold(p.seed, rng::kTagSketch, row), coord);
}

void check_params(const CountSketchParams& p) {
  if (p.rows == 0 || p.cols == 0 || p.dim == 0)
    throw std::invalid_argument("count sketch: rows, cols, dim must be >= 1");
}

}  // namespace

std::uint32_t cs_bucket(const CountSketchParams& p, std::uint32_t row,
                        std::uint32_t coord) {
  return static_cast<std::uint32_t>((hash_cell(p, row, coord) >> 32) % p.cols);
}

double cs_sign(const CountSketchParams& p, std::uint32_t row,
               std::uint32_t coord) {
  return (hash_cell(p, row, coord) & 1ull) ? 1.0 : -1.0;
}

CountSketchOperator::CountSketchOperator(const CountSketchParams& params)
    : params_(params) {
  check_params(params_);
  const std::size_t total =
      static_cast<std::size_t>(params_.rows) * params_.dim;
  buckets_.resize(total);
  signs_.resize(total);
  for (std::uint32_t i = 0; i < params_.rows; ++i) {
    const std::uint64_t row_key =
        rng::fold(params_.seed, rng::kTagSketch, i);
    for (std::uint32_t j = 0; j < params_.dim; ++j) {
      const std::uint64_t h = rng::fold(row_key, j);
      const std::size_t at = static_cast<std::size_t>(i) * params_.dim + j;
      buckets_[at] = static_cast<std::uint32_t>((h >> 32) % params_.cols);
      signs_[at] = (h & 1ull) ? 1.0 : -1.0;
    }
  }
}

SketchTable CountSketchOperator::compress(const DenseSignal& x) const {
  if (x.size() != params_.dim)
    throw std::invalid_argument("cs_compress: signal dimension mismatch");
  SketchTable table{params_, std::vector<double>(
                                 static_cast<std::size_t>(params_.rows) *
                                     params_.cols,
                                 0.0)};
  for (std::uint32_t i = 0; i < params_.rows; ++i) {
    const std::size_t hash_base = static_cast<std::size_t>(i) * params_.dim;
    double* row_cells = table.cells.data() +
                        static_cast<std::size_t>(i) * params_.cols;
    for (std::uint32_t j = 0; j < params_.dim; ++j)
      row_cells[buckets_[hash_base + j]] += signs_[hash_base + j] * x[j];
  }
  return table;
}

DenseSignal CountSketchOperator::estimate(const SketchTable& table) const {
  if (!(table.params == params_))
    throw std::invalid_argument("cs estimate: table params mismatch");
  const std::uint32_t r = params_.rows;
  DenseSignal out(params_.dim);
  std::vector<double> votes(r);
  for (std::uint32_t j = 0; j < params_.dim; ++j) {
    for (std::uint32_t i = 0; i < r; ++i) {
      const std::size_t at = static_cast<std::size_t>(i) * params_.dim + j;
      votes[i] = signs_[at] *
                 table.cells[static_cast<std::size_t>(i) * params_.cols +
                             buckets_[at]];
    }
    std::sort(votes.begin(), votes.end());
    out[j] = (r % 2 == 1) ? votes[r / 2]
                          : 0.5 * (votes[r / 2 - 1] + votes[r / 2]);
  }
  return out;
}

SparseSignal CountSketchOperator::reconstruct(const SketchTable& table,
                                              std::size_t k) const {
  if (k < 1)
    throw std::invalid_argument("cs_reconstruct: k must be at least 1");
  return best_k(estimate(table), k);
}

SketchTable cs_compress(const DenseSignal& x, const CountSketchParams& params) {
  return CountSketchOperator(params).compress(x);
}

SketchTable cs_combine(const std::vector<SketchTable>& tables,
                       const std::vector<double>& weights) {
  if (tables.empty())
    throw std::invalid_argument("cs_combine: no tables to combine");
  if (tables.size() != weights.size())
    throw std::invalid_argument("cs_combine: one weight per table required");
  const CountSketchParams& params = tables.front().params;
  for (const SketchTable& t : tables)
    if (!(t.params == params))
      throw std::invalid_argument("cs_combine: mismatched sketch params");
  SketchTable out{params,
                  std::vector<double>(tables.front().cells.size(), 0.0)};
  for (std::size_t t = 0; t < tables.size(); ++t)
    for (std::size_t c = 0; c < out.cells.size(); ++c)
      out.cells[c] += weights[t] * tables[t].cells[c];
  return out;
}

SparseSignal cs_reconstruct(const SketchTable& table, std::size_t k) {
  return CountSketchOperator(table.params).reconstruct(table, k);
}

}  // namespace csgrad
