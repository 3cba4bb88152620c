#pragma once

#include "csgrad/oracle.hpp"
#include "csgrad/rng.hpp"
#include "csgrad/signal.hpp"

namespace csgrad {

// Family of diagonal quadratics f_i(x) = 1/2 (x - x0)^T A_i (x - x0)
// whose device-average spectrum is pinned to exp(-j/300) + 0.001 (j
// 1-based).  Per coordinate, the device diagonals are a mean-centered
// Gaussian cloud around that value, so averaging over devices recovers
// the spectrum to rounding error.  A_i entries may go negative at small
// n; the average stays positive, so f is convex even when an f_i is not.
struct SyntheticProblem {
  std::size_t dim = 0;
  std::size_t devices = 0;
  DenseSignal optimum;              // x0, the shared minimizer
  std::vector<double> device_diag;  // devices x dim, row-major: (A_i)_jj
  DenseSignal mean_diag;            // per-coordinate mean over devices

  // Stochastic-gradient noise: g_i = A_i (x - x0) + dense_noise_scale * A u1
  //                                + spike_noise_scale * (b .* u2)
  double dense_noise_scale = 12.5;  // R1
  double spike_noise_scale = 50.0;  // R2
  double spike_prob = 1.5e-3;       // Bernoulli rate of the spike mask
};

// Deterministic in (d, n, seed).  The optimum is standard normal; both
// it and the diagonals are fixed once generated.
SyntheticProblem make_problem(std::size_t d, std::size_t n,
                              std::uint64_t seed);

// f(x) = 1/2 (x - x0)^T A (x - x0) with A the device-average diagonal;
// equals the average of the f_i exactly, minimum 0 at x0.
double objective(const SyntheticProblem& problem, const DenseSignal& x);

// A (x - x0); zero at the optimum.
DenseSignal exact_gradient(const SyntheticProblem& problem,
                           const DenseSignal& x);

// One stochastic gradient draw for the given device.  Stream consumption
// order: d Gaussians for u1, then per coordinate one uniform for the
// spike mask and, when it fires, one Gaussian for the spike value.
DenseSignal grad_oracle(const SyntheticProblem& problem, std::size_t device,
                        const DenseSignal& x, rng::Stream& noise);

// Benchmark signal g = g_sp + g_n: k_nnz uniformly placed standard-normal
// spikes plus dense N(0, sigma_n^2) noise.
DenseSignal make_recon_signal(std::size_t d, std::size_t k_nnz, double sigma_n,
                              rng::Stream& stream);

// Adapter for the optimization engines.
class SyntheticOracle final : public GradientOracle {
 public:
  explicit SyntheticOracle(SyntheticProblem problem)
      : problem_(std::move(problem)) {}

  const SyntheticProblem& problem() const { return problem_; }

  std::size_t dim() const override { return problem_.dim; }
  std::size_t devices() const override { return problem_.devices; }

  DenseSignal sample_gradient(std::size_t device, const DenseSignal& x,
                              rng::Stream& noise) const override {
    return grad_oracle(problem_, device, x, noise);
  }

  DenseSignal exact_gradient(const DenseSignal& x) const override {
    return csgrad::exact_gradient(problem_, x);
  }

  double objective(const DenseSignal& x) const override {
    return csgrad::objective(problem_, x);
  }

 private:
  SyntheticProblem problem_;
};

}  // namespace csgrad
