#pragma once

#include "csgrad/sensing.hpp"
#include "csgrad/signal.hpp"

namespace csgrad {

enum class FihtStop { MaxIters, SmallNorm, Stalled };

struct FihtParams {
  std::size_t sparsity = 0;    // K, number of nonzeros in the output
  std::size_t max_iters = 25;  // full accelerated iterations
  double residual_tol = 1e-4;  // stop once |w(s)|_2 falls below this
  std::size_t stall_window = 4;
  double stall_rel_std = 0.01;  // std <= this fraction of the window mean
};

struct FihtResult {
  SparseSignal estimate;  // at most `sparsity` nonzeros
  std::size_t iterations_used = 0;
  FihtStop stop_reason = FihtStop::MaxIters;
};

// Fast Iterative Hard Thresholding: accelerated projected gradient with
// extrapolation and exact line-search step sizes, all sensing products
// through the fast transform.  Deterministic in (y, phi, params); never
// reports failure through exceptions, the stop reason says how it ended.
// A zero denominator in any step-size ratio means the search direction
// vanished, so the corresponding coefficient is set to zero instead of
// dividing.
FihtResult fiht(const Measurement& y, const SensingMatrix& phi,
                const FihtParams& params);

// fiht with default parameters; this is the reconstruction the server
// plugs into the optimization loop.
SparseSignal reconstruct(const Measurement& y, const SensingMatrix& phi,
                         std::size_t sparsity);

}  // namespace csgrad
