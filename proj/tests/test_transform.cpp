#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "csgrad/rng.hpp"
#include "csgrad/transform.hpp"

using namespace csgrad;

namespace {

// The recursive H^(k) definition, built literally as the test oracle.
DenseMatrix recursive_hadamard(std::size_t d) {
  DenseMatrix h{1, 1, {1.0}};
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  while (h.rows < d) {
    const std::size_t m = h.rows;
    DenseMatrix next{2 * m, 2 * m, std::vector<double>(4 * m * m)};
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double v = inv_sqrt2 * h.at(i, j);
        next.at(i, j) = v;
        next.at(i, j + m) = v;
        next.at(i + m, j) = v;
        next.at(i + m, j + m) = -v;
      }
    }
    h = std::move(next);
  }
  return h;
}

DenseSignal matvec(const DenseMatrix& m, const DenseSignal& x) {
  DenseSignal out(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out[i] += m.at(i, j) * x[j];
  return out;
}

double max_abs_diff(const DenseSignal& a, const DenseSignal& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("transform") {

TEST_CASE("fwht base cases from the recursion") {
  const DenseSignal one_zero = fwht({1.0, 0.0});
  CHECK(one_zero[0] == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-15));
  CHECK(one_zero[1] == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-15));

  const DenseSignal ones = fwht({1.0, 1.0});
  CHECK(ones[0] == doctest::Approx(std::numbers::sqrt2).epsilon(1e-15));
  CHECK(ones[1] == doctest::Approx(0.0));

  CHECK(fwht({3.5}) == DenseSignal{3.5});
  CHECK_THROWS_AS(fwht({1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(fwht({}), std::invalid_argument);
}

TEST_CASE("fwht agrees with the dense recursive matrix") {
  rng::Stream stream(rng::fold(21, 1));
  for (std::size_t d = 2; d <= 1024; d <<= 1) {
    const DenseMatrix h = recursive_hadamard(d);
    DenseSignal x(d);
    stream.fill_gaussian(x);
    CHECK(max_abs_diff(fwht(x), matvec(h, x)) <= 1e-10);
  }
}

TEST_CASE("fwht involution and Parseval") {
  rng::Stream stream(rng::fold(22, 1));
  DenseSignal x(256);
  stream.fill_gaussian(x);
  CHECK(max_abs_diff(fwht(fwht(x)), x) <= 1e-10);

  DenseSignal big(1 << 16);
  stream.fill_gaussian(big);
  const double before = l2_norm(big);
  const double after = l2_norm(fwht(big));
  CHECK(std::fabs(after - before) <= 1e-12 * before);
}

TEST_CASE("hadamard entries stay below sqrt(2/d)") {
  for (std::size_t d : {2u, 8u, 64u}) {
    const DenseMatrix h = recursive_hadamard(d);
    const double bound = std::sqrt(2.0 / static_cast<double>(d)) + 1e-12;
    for (double v : h.data) CHECK(std::fabs(v) <= bound);
  }
}

TEST_CASE("dct reference matrix") {
  const DenseMatrix unit = dct_reference(1);
  CHECK(unit.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  const DenseMatrix two = dct_reference(2);
  const double r = 1.0 / std::numbers::sqrt2;
  CHECK(two.at(0, 0) == doctest::Approx(r).epsilon(1e-12));
  CHECK(two.at(0, 1) == doctest::Approx(r).epsilon(1e-12));
  CHECK(two.at(1, 0) == doctest::Approx(r).epsilon(1e-12));
  CHECK(two.at(1, 1) == doctest::Approx(-r).epsilon(1e-12));

  // recompute straight from the formula at d = 8
  const std::size_t d = 8;
  const DenseMatrix b = dct_reference(d);
  for (std::size_t i = 1; i <= d; ++i) {
    for (std::size_t j = 1; j <= d; ++j) {
      const double expected =
          std::sqrt(2.0 / d) * (i == 1 ? 1.0 / std::numbers::sqrt2 : 1.0) *
          std::cos(std::numbers::pi * static_cast<double>(i - 1) *
                   (2.0 * static_cast<double>(j) - 1.0) / (2.0 * d));
      CHECK(b.at(i - 1, j - 1) == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  CHECK_THROWS_AS(dct_reference(4097), std::length_error);
  CHECK_THROWS_AS(dct_reference(0), std::invalid_argument);
}

TEST_CASE("dct rows are orthonormal") {
  for (std::size_t d : {4u, 16u, 33u}) {
    const DenseMatrix b = dct_reference(d);
    const double bound = std::sqrt(2.0 / static_cast<double>(d)) + 1e-12;
    for (double v : b.data) CHECK(std::fabs(v) <= bound);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        double g = 0.0;
        for (std::size_t j = 0; j < d; ++j) g += b.at(i, j) * b.at(k, j);
        CHECK(std::fabs(g - (i == k ? 1.0 : 0.0)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("padding and truncation") {
  CHECK(pad_to_pow2({1.0, 2.0, 3.0}) == DenseSignal{1.0, 2.0, 3.0, 0.0});
  CHECK(pad_to_pow2({1.0, 2.0}) == DenseSignal{1.0, 2.0});
  CHECK(pad_to_pow2(DenseSignal(5, 1.0)).size() == 8);

  CHECK(truncate({1.0, 2.0, 3.0, 0.0}, 3) == DenseSignal{1.0, 2.0, 3.0});
  CHECK(truncate({1.0, 2.0}, 2) == DenseSignal{1.0, 2.0});
  CHECK_THROWS_AS(truncate({1.0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(truncate({1.0}, 0), std::invalid_argument);

  rng::Stream stream(rng::fold(23, 1));
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + stream.next_below(3000);
    DenseSignal x(d);
    stream.fill_gaussian(x);
    CHECK(truncate(pad_to_pow2(x), d) == x);
  }
}

}  // TEST_SUITE
