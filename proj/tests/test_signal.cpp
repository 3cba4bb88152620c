#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "csgrad/rng.hpp"
#include "csgrad/signal.hpp"

using namespace csgrad;

namespace {

DenseSignal random_signal(rng::Stream& stream, std::size_t d,
                          double zero_prob = 0.0) {
  DenseSignal x(d);
  for (double& v : x)
    v = stream.next_bernoulli(zero_prob) ? 0.0 : stream.next_gaussian();
  return x;
}

// Residual energy of keeping exactly the index set `kept`.
double residual_energy(const DenseSignal& x, const std::vector<bool>& kept) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!kept[j]) s += x[j] * x[j];
  return s;
}

// Exhaustive minimum of the K-term approximation error (Gosper's hack
// over K-subsets); independent of the selection code under test.
double brute_force_min_residual(const DenseSignal& x, std::size_t k) {
  const std::size_t d = x.size();
  if (k >= d) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const std::uint32_t limit = 1u << d;
  std::uint32_t mask = (1u << k) - 1;
  while (mask < limit) {
    double res = 0.0;
    for (std::size_t j = 0; j < d; ++j)
      if (!(mask & (1u << j))) res += x[j] * x[j];
    best = std::min(best, res);
    // next subset of the same popcount
    const std::uint32_t c = mask & -mask;
    const std::uint32_t r = mask + c;
    mask = (((r ^ mask) >> 2) / c) | r;
    if (c == 0) break;
  }
  return best;
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("sparsity level on reference inputs") {
  CHECK(sparsity_level(DenseSignal(8, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  DenseSignal basis(16, 0.0);
  basis[3] = 1.0;
  CHECK(sparsity_level(basis) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(sparsity_level({3.0, 4.0, 0.0, 0.0}) == doctest::Approx(0.49).epsilon(1e-15));
  CHECK_THROWS_AS(sparsity_level(DenseSignal(5, 0.0)), std::domain_error);
}

TEST_CASE("sparsity level bounds and scale invariance") {
  rng::Stream stream(rng::fold(11, 1));
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = 1 + stream.next_below(64);
    DenseSignal x = random_signal(stream, d);
    if (is_zero(x)) continue;
    const double sp = sparsity_level(x);
    CHECK(sp >= 1.0 / static_cast<double>(d) - 1e-12);
    CHECK(sp <= 1.0 + 1e-12);
    for (double c : {2.5, -3.0, 1e8}) {
      CHECK(std::fabs(sparsity_level(scaled(x, c)) - sp) <= 1e-12);
    }
  }
  // equal magnitudes hit the upper bound exactly
  DenseSignal flat(32);
  for (std::size_t j = 0; j < flat.size(); ++j) flat[j] = (j % 2) ? 1.0 : -1.0;
  CHECK(sparsity_level(flat) == 1.0);
}

TEST_CASE("best_k on reference inputs") {
  const SparseSignal top2 = best_k({5.0, -3.0, 1.0}, 2);
  REQUIRE(top2.entries.size() == 2);
  CHECK(top2.entries[0] == SparseEntry{0, 5.0});
  CHECK(top2.entries[1] == SparseEntry{1, -3.0});

  CHECK(best_k(DenseSignal(3, 0.0), 2).entries.empty());

  // ties keep the lowest indices
  const SparseSignal tied = best_k({1.0, -1.0, 1.0}, 2);
  REQUIRE(tied.entries.size() == 2);
  CHECK(tied.entries[0] == SparseEntry{0, 1.0});
  CHECK(tied.entries[1] == SparseEntry{1, -1.0});
}

TEST_CASE("best_k matches the exhaustive minimum") {
  rng::Stream stream(rng::fold(12, 1));
  int exhaustive_cases = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t d = 1 + stream.next_below(64);
    const std::size_t k = 1 + stream.next_below(d);
    const DenseSignal x = random_signal(stream, d, 0.2);
    const double impl =
        squared_l2_norm(subtract(x, densify(best_k(x, k))));

    // Independent route: sort magnitudes, sum the tail.
    DenseSignal mags(d);
    for (std::size_t j = 0; j < d; ++j) mags[j] = std::fabs(x[j]);
    std::sort(mags.begin(), mags.end());
    double tail = 0.0;
    for (std::size_t j = 0; j + k < d; ++j) tail += mags[j] * mags[j];
    CHECK(std::fabs(impl - tail) <= 1e-12 * (1.0 + tail));

    if (d <= 16) {
      ++exhaustive_cases;
      const double brute = brute_force_min_residual(x, k);
      CHECK(std::fabs(impl - brute) <= 1e-12 * (1.0 + brute));
    }
  }
  CHECK(exhaustive_cases > 50);
}

TEST_CASE("best_k beats arbitrary sparse competitors") {
  rng::Stream stream(rng::fold(13, 1));
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 4 + stream.next_below(40);
    const std::size_t k = 1 + stream.next_below(d);
    const DenseSignal x = random_signal(stream, d);
    const double impl = l2_norm(subtract(x, densify(best_k(x, k))));
    SparseSignal rival;
    rival.dim = static_cast<std::uint32_t>(d);
    for (std::uint32_t j : rng::sample_without_replacement(d, k, stream))
      rival.entries.push_back({j, stream.next_gaussian()});
    CHECK(impl <= l2_norm(subtract(x, densify(rival))) + 1e-12);
  }
}

TEST_CASE("principal support on reference inputs") {
  CHECK(principal_support({5.0, -3.0, 1.0}, 2) == IndexSet{0, 1});
  CHECK(principal_support(DenseSignal(6, 0.0), 2) == IndexSet{0, 1});
  CHECK(principal_support({1.0, 2.0, 3.0}, 7) == IndexSet{0, 1, 2});
}

TEST_CASE("project keeps exactly the selected entries") {
  CHECK(project({1.0, 2.0, 3.0}, {1}) == DenseSignal{0.0, 2.0, 0.0});
  CHECK(project({1.0, 2.0, 3.0}, {0, 1, 2}) == DenseSignal{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(project({1.0, 2.0}, {5}), std::out_of_range);

  rng::Stream stream(rng::fold(14, 1));
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 1 + stream.next_below(32);
    const DenseSignal x = random_signal(stream, d);
    const IndexSet s = rng::sample_without_replacement(
        d, stream.next_below(d + 1), stream);
    const DenseSignal once = project(x, s);
    CHECK(project(once, s) == once);
  }
}

TEST_CASE("best_k plus complementary projection restores the signal") {
  rng::Stream stream(rng::fold(15, 1));
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 1 + stream.next_below(48);
    const std::size_t k = 1 + stream.next_below(d + 4);
    const DenseSignal x = random_signal(stream, d, 0.3);
    const IndexSet kept = principal_support(x, k);
    std::vector<bool> in_kept(d, false);
    for (std::uint32_t j : kept) in_kept[j] = true;
    IndexSet rest;
    for (std::size_t j = 0; j < d; ++j)
      if (!in_kept[j]) rest.push_back(static_cast<std::uint32_t>(j));
    const DenseSignal sum =
        add_scaled(densify(best_k(x, k)), 1.0, project(x, rest));
    CHECK(sum == x);
  }
}

TEST_CASE("support lists the nonzero coordinates") {
  CHECK(support({0.0, 2.0, 0.0, -1.0}) == IndexSet{1, 3});
  CHECK(support(DenseSignal(4, 0.0)).empty());
}

}  // TEST_SUITE
