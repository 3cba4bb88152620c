#pragma once

#include "csgrad/rng.hpp"
#include "csgrad/signal.hpp"

namespace csgrad {

// Problem interface the optimization engines run against.  Device
// gradient draws are unbiased for the device's local gradient; the exact
// gradient and the objective exist for metrics, not for the optimizer.
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t devices() const = 0;

  // Stochastic gradient of device `device` at x, drawing all randomness
  // from `noise`.  Pure given the stream state, safe to call concurrently
  // with distinct streams.
  virtual DenseSignal sample_gradient(std::size_t device, const DenseSignal& x,
                                      rng::Stream& noise) const = 0;

  virtual DenseSignal exact_gradient(const DenseSignal& x) const = 0;
  virtual double objective(const DenseSignal& x) const = 0;
};

}  // namespace csgrad
