#include "csgrad/fiht.hpp"

#include <cmath>
#include <stdexcept>

namespace csgrad {

namespace {

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

struct WindowStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

WindowStats tail_stats(const std::vector<double>& values, std::size_t window) {
  WindowStats st;
  const std::size_t begin = values.size() - window;
  for (std::size_t i = begin; i < values.size(); ++i) st.mean += values[i];
  st.mean /= static_cast<double>(window);
  double var = 0.0;
  for (std::size_t i = begin; i < values.size(); ++i) {
    const double dev = values[i] - st.mean;
    var += dev * dev;
  }
  st.stddev = std::sqrt(var / static_cast<double>(window));
  return st;
}

}  // namespace

FihtResult fiht(const Measurement& y, const SensingMatrix& phi,
                const FihtParams& params) {
  const std::size_t d = phi.dim;
  if (y.size() != phi.measurements())
    throw std::invalid_argument("fiht: measurement length mismatch");
  if (params.sparsity < 1 || params.sparsity > d)
    throw std::invalid_argument("fiht: sparsity must be in [1, d]");
  if (params.stall_window < 1)
    throw std::invalid_argument("fiht: stall window must be positive");

  // Initialization: one projected adjoint step.
  const DenseSignal first_grad = phi.adjoint(y);  // w(0)
  DenseSignal cur =
      project(first_grad, principal_support(first_grad, params.sparsity));
  DenseSignal prev(d, 0.0);

  std::vector<double> iterate_norms{l2_norm(first_grad)};
  if (iterate_norms.back() <= params.residual_tol)
    return {best_k(cur, params.sparsity), 0, FihtStop::SmallNorm};

  std::size_t s = 1;
  FihtStop reason = FihtStop::MaxIters;
  for (;;) {
    // Extrapolation coefficient from the previous two iterates.
    double tau = 0.0;
    if (s > 1) {
      const Measurement sensed_step = phi.apply(subtract(cur, prev));
      const Measurement residual = subtract(y, phi.apply(cur));
      tau = safe_ratio(dot(residual, sensed_step),
                       squared_l2_norm(sensed_step));
    }
    const DenseSignal extrapolated = add_scaled(cur, tau, subtract(cur, prev));

    // Gradient at the extrapolated point, exact line search on its support.
    const DenseSignal grad =
        phi.adjoint(subtract(y, phi.apply(extrapolated)));
    const DenseSignal grad_on_support = project(grad, support(extrapolated));
    const double pre_step =
        safe_ratio(squared_l2_norm(grad_on_support),
                   squared_l2_norm(phi.apply(grad_on_support)));
    const DenseSignal lifted = add_scaled(extrapolated, pre_step, grad);

    // Hard threshold, then one more exact line-search step on the new
    // support.
    const IndexSet top = principal_support(lifted, params.sparsity);
    const DenseSignal thresholded = project(lifted, top);
    const DenseSignal post_grad =
        phi.adjoint(subtract(y, phi.apply(thresholded)));
    const DenseSignal post_on_support = project(post_grad, top);
    const double post_step =
        safe_ratio(squared_l2_norm(post_on_support),
                   squared_l2_norm(phi.apply(post_on_support)));
    prev = std::move(cur);
    cur = add_scaled(thresholded, post_step, post_on_support);

    iterate_norms.push_back(l2_norm(extrapolated));

    if (s >= params.max_iters) {
      reason = FihtStop::MaxIters;
      break;
    }
    if (iterate_norms.back() <= params.residual_tol) {
      reason = FihtStop::SmallNorm;
      break;
    }
    if (iterate_norms.size() >= params.stall_window) {
      const WindowStats st = tail_stats(iterate_norms, params.stall_window);
      if (st.stddev <= params.stall_rel_std * st.mean) {
        reason = FihtStop::Stalled;
        break;
      }
    }
    ++s;
  }
  return {best_k(cur, params.sparsity), s, reason};
}

SparseSignal reconstruct(const Measurement& y, const SensingMatrix& phi,
                         std::size_t sparsity) {
  FihtParams params;
  params.sparsity = sparsity;
  return fiht(y, phi, params).estimate;
}

}  // namespace csgrad
