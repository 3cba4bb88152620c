#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "csgrad/rng.hpp"
#include "csgrad/synth.hpp"

using namespace csgrad;

namespace {

double spectrum(std::size_t one_based) {
  return std::exp(-static_cast<double>(one_based) / 300.0) + 0.001;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("single-device problems collapse to the exact spectrum") {
  const SyntheticProblem p = make_problem(16, 1, 7);
  for (std::size_t j = 0; j < 16; ++j) {
    CHECK(p.device_diag[j] == spectrum(j + 1));
    CHECK(p.mean_diag[j] == spectrum(j + 1));
  }
}

TEST_CASE("device averages match the spectrum for every coordinate") {
  const SyntheticProblem p = make_problem(64, 7, 123);
  for (std::size_t j = 0; j < 64; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 7; ++i) mean += p.device_diag[i * 64 + j];
    mean /= 7.0;
    CHECK(std::fabs(mean - spectrum(j + 1)) <= 1e-12);
  }
}

TEST_CASE("construction is seeded and validated") {
  const SyntheticProblem a = make_problem(32, 4, 9);
  const SyntheticProblem b = make_problem(32, 4, 9);
  CHECK(a.device_diag == b.device_diag);
  CHECK(a.optimum == b.optimum);
  const SyntheticProblem c = make_problem(32, 4, 10);
  CHECK(a.optimum != c.optimum);

  CHECK_THROWS_AS(make_problem(0, 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(4, 0, 1), std::invalid_argument);
}

TEST_CASE("objective value and minimum") {
  const SyntheticProblem p = make_problem(24, 3, 11);
  CHECK(objective(p, p.optimum) == 0.0);
  CHECK(is_zero(exact_gradient(p, p.optimum)));

  // scalar case evaluated from the closed form
  const SyntheticProblem scalar = make_problem(1, 1, 2);
  DenseSignal x = scalar.optimum;
  x[0] += 2.0;
  CHECK(objective(scalar, x) ==
        doctest::Approx(0.5 * 4.0 * spectrum(1)).epsilon(1e-14));
  CHECK_THROWS_AS(objective(scalar, DenseSignal(2, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("gradient matches central differences") {
  const std::size_t d = 32;
  const SyntheticProblem p = make_problem(d, 5, 13);
  rng::Stream stream(rng::fold(61, 1));
  DenseSignal x(d);
  stream.fill_gaussian(x);
  const DenseSignal grad = exact_gradient(p, x);
  const double h = 1e-4;
  for (std::size_t j = 0; j < d; ++j) {
    DenseSignal hi = x;
    DenseSignal lo = x;
    hi[j] += h;
    lo[j] -= h;
    const double fd = (objective(p, hi) - objective(p, lo)) / (2.0 * h);
    CHECK(std::fabs(fd - grad[j]) <= 1e-5);
  }
}

TEST_CASE("gradient equals the device-mean of per-device products") {
  const std::size_t d = 48;
  const std::size_t n = 6;
  const SyntheticProblem p = make_problem(d, n, 17);
  rng::Stream stream(rng::fold(62, 1));
  DenseSignal x(d);
  stream.fill_gaussian(x);
  const DenseSignal grad = exact_gradient(p, x);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      mean += p.device_diag[i * d + j] * (x[j] - p.optimum[j]);
    mean /= static_cast<double>(n);
    CHECK(std::fabs(mean - grad[j]) <= 1e-12 * (1.0 + std::fabs(grad[j])));
  }
}

TEST_CASE("noise terms switch off with their scales") {
  SyntheticProblem p = make_problem(20, 3, 19);
  p.dense_noise_scale = 0.0;
  p.spike_noise_scale = 0.0;
  rng::Stream stream(rng::fold(63, 1));
  DenseSignal x(20);
  stream.fill_gaussian(x);
  const DenseSignal g = grad_oracle(p, 1, x, stream);
  for (std::size_t j = 0; j < 20; ++j)
    CHECK(g[j] == p.device_diag[20 + j] * (x[j] - p.optimum[j]));

  SyntheticProblem no_spikes = make_problem(20, 3, 19);
  no_spikes.dense_noise_scale = 0.0;
  no_spikes.spike_prob = 0.0;
  rng::Stream stream2(rng::fold(63, 2));
  const DenseSignal g2 = grad_oracle(no_spikes, 0, x, stream2);
  for (std::size_t j = 0; j < 20; ++j)
    CHECK(g2[j] == no_spikes.device_diag[j] * (x[j] - no_spikes.optimum[j]));

  CHECK_THROWS_AS(grad_oracle(p, 3, x, stream), std::invalid_argument);
  CHECK_THROWS_AS(grad_oracle(p, 0, DenseSignal(19, 0.0), stream),
                  std::invalid_argument);
}

TEST_CASE("stochastic gradients are unbiased, Monte Carlo") {
  const std::size_t d = 128;
  const SyntheticProblem p = make_problem(d, 4, 23);
  rng::Stream point_stream(rng::fold(64, 1));
  DenseSignal x(d);
  point_stream.fill_gaussian(x);
  const std::size_t device = 2;
  DenseSignal expected(d);
  for (std::size_t j = 0; j < d; ++j)
    expected[j] = p.device_diag[device * d + j] * (x[j] - p.optimum[j]);

  const int draws = 10000;
  DenseSignal sum(d, 0.0);
  DenseSignal sumsq(d, 0.0);
  for (int r = 0; r < draws; ++r) {
    rng::Stream stream(rng::fold(64, 2, static_cast<std::uint64_t>(r)));
    const DenseSignal g = grad_oracle(p, device, x, stream);
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = g[j] - expected[j];
      sum[j] += dev;
      sumsq[j] += dev * dev;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double mean = sum[j] / draws;
    const double var = sumsq[j] / draws - mean * mean;
    const double stderr_bound = 4.0 * std::sqrt(var) / std::sqrt(double(draws));
    CHECK(std::fabs(mean) <= stderr_bound);
  }
}

TEST_CASE("noise second moment matches the closed form within 5 percent") {
  const std::size_t d = 1024;
  const SyntheticProblem p = make_problem(d, 4, 29);
  const DenseSignal x = p.optimum;  // base term drops out

  double spectrum_sq = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    spectrum_sq += p.mean_diag[j] * p.mean_diag[j];
  const double closed_form =
      p.dense_noise_scale * p.dense_noise_scale * spectrum_sq +
      p.spike_noise_scale * p.spike_noise_scale * p.spike_prob *
          static_cast<double>(d);

  const int draws = 10000;
  double acc = 0.0;
  for (int r = 0; r < draws; ++r) {
    rng::Stream stream(rng::fold(65, 1, static_cast<std::uint64_t>(r)));
    acc += squared_l2_norm(grad_oracle(p, 1, x, stream));
  }
  acc /= draws;
  CHECK(std::fabs(acc - closed_form) <= 0.05 * closed_form);
}

TEST_CASE("reconstruction signals") {
  rng::Stream stream(rng::fold(66, 1));
  CHECK(is_zero(make_recon_signal(64, 0, 0.0, stream)));

  const DenseSignal sparse_only = make_recon_signal(4096, 130, 0.0, stream);
  std::size_t nnz = 0;
  for (double v : sparse_only)
    if (v != 0.0) ++nnz;
  CHECK(nnz == 130);

  // sanity envelope on the sparsity metric at benchmark scale
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    rng::Stream s(rng::fold(66, 2, seed));
    const DenseSignal g = make_recon_signal(1 << 16, 3000, 0.05, s);
    const double sp = sparsity_level(g);
    CHECK(sp > 0.0);
    CHECK(sp < 0.5);
  }

  rng::Stream s2(rng::fold(66, 3));
  CHECK_THROWS_AS(make_recon_signal(8, 9, 0.0, s2), std::invalid_argument);
}

}  // TEST_SUITE
