#include "csgrad/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace csgrad {

namespace {

double spectrum_at(std::size_t coord) {
  // 1-based coordinate in the exponent.
  return std::exp(-static_cast<double>(coord + 1) / 300.0) + 0.001;
}

void check_dims(const SyntheticProblem& problem, const DenseSignal& x) {
  if (x.size() != problem.dim)
    throw std::invalid_argument("synthetic problem: dimension mismatch");
}

}  // namespace

SyntheticProblem make_problem(std::size_t d, std::size_t n,
                              std::uint64_t seed) {
  if (d == 0 || n == 0)
    throw std::invalid_argument("make_problem: d and n must be positive");
  SyntheticProblem problem;
  problem.dim = d;
  problem.devices = n;
  problem.device_diag.resize(n * d);
  problem.mean_diag.resize(d);

  rng::Stream stream(rng::fold(seed, rng::kTagProblem));
  std::vector<double> cloud(n);
  for (std::size_t j = 0; j < d; ++j) {
    // Gaussian cloud centered to mean zero realizes the covariance
    // I - (1/n) 1 1^T and forces the device average onto the spectrum.
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cloud[i] = stream.next_gaussian();
      mean += cloud[i];
    }
    mean /= static_cast<double>(n);
    const double mu = spectrum_at(j);
    double realized = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double value = mu + (cloud[i] - mean);
      problem.device_diag[i * d + j] = value;
      realized += value;
    }
    problem.mean_diag[j] = realized / static_cast<double>(n);
  }

  problem.optimum.resize(d);
  stream.fill_gaussian(problem.optimum);
  return problem;
}

double objective(const SyntheticProblem& problem, const DenseSignal& x) {
  check_dims(problem, x);
  double value = 0.0;
  for (std::size_t j = 0; j < problem.dim; ++j) {
    const double diff = x[j] - problem.optimum[j];
    value += problem.mean_diag[j] * diff * diff;
  }
  return 0.5 * value;
}

DenseSignal exact_gradient(const SyntheticProblem& problem,
                           const DenseSignal& x) {
  check_dims(problem, x);
  DenseSignal grad(problem.dim);
  for (std::size_t j = 0; j < problem.dim; ++j)
    grad[j] = problem.mean_diag[j] * (x[j] - problem.optimum[j]);
  return grad;
}

DenseSignal grad_oracle(const SyntheticProblem& problem, std::size_t device,
                        const DenseSignal& x, rng::Stream& noise) {
  check_dims(problem, x);
  if (device >= problem.devices)
    throw std::invalid_argument("grad_oracle: device index out of range");
  const std::size_t d = problem.dim;
  const double* diag = problem.device_diag.data() + device * d;
  DenseSignal g(d);
  for (std::size_t j = 0; j < d; ++j)
    g[j] = diag[j] * (x[j] - problem.optimum[j]) +
           problem.dense_noise_scale * problem.mean_diag[j] *
               noise.next_gaussian();
  if (problem.spike_prob > 0.0 && problem.spike_noise_scale != 0.0) {
    for (std::size_t j = 0; j < d; ++j)
      if (noise.next_bernoulli(problem.spike_prob))
        g[j] += problem.spike_noise_scale * noise.next_gaussian();
  }
  return g;
}

DenseSignal make_recon_signal(std::size_t d, std::size_t k_nnz, double sigma_n,
                              rng::Stream& stream) {
  if (k_nnz > d)
    throw std::invalid_argument("make_recon_signal: k_nnz exceeds dimension");
  DenseSignal g(d, 0.0);
  const std::vector<std::uint32_t> positions =
      rng::sample_without_replacement(d, k_nnz, stream);
  for (std::uint32_t p : positions) g[p] = stream.next_gaussian();
  if (sigma_n > 0.0)
    for (std::size_t j = 0; j < d; ++j)
      g[j] += sigma_n * stream.next_gaussian();
  return g;
}

}  // namespace csgrad
