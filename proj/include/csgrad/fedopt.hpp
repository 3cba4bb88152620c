#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "csgrad/count_sketch.hpp"
#include "csgrad/fiht.hpp"
#include "csgrad/oracle.hpp"
#include "csgrad/rng.hpp"
#include "csgrad/sensing.hpp"
#include "csgrad/signal.hpp"

namespace csgrad {

// Additive upload-channel noise, one i.i.d. N(0, W^2) vector per round
// applied after aggregation.  Kind None behaves exactly like IidGaussian
// with W = 0.
struct ChannelModel {
  enum class Kind { None, IidGaussian };
  Kind kind = Kind::IidGaussian;
  double noise_std = 0.0;

  bool active() const {
    return kind == Kind::IidGaussian && noise_std > 0.0;
  }
};

// Everything persistent lives at the server; devices are stateless.
struct ServerState {
  DenseSignal x;         // current iterate
  Measurement feedback;  // error-feedback accumulator, one entry per measurement
  double step_size = 0.0;
  std::size_t round = 1;
};

// Per-round trace row, evaluated at the pre-update iterate.  Optional
// fields go empty when the quantity is undefined for the algorithm (or
// when a sparsity level hits the zero vector).
struct MetricsRecord {
  std::size_t round = 0;
  double objective_value = 0.0;
  double gradient_norm = 0.0;
  std::optional<double> gradient_sparsity;  // sp of the mean gradient
  std::optional<double> update_sparsity;    // sp of the debiased update target
  std::size_t update_nnz = 0;
  std::optional<double> feedback_norm;
  std::optional<double> recon_residual;
};

using RunTrace = std::vector<MetricsRecord>;

// Virtual sequences of the server-side error feedback: the signal-domain
// error carry e(t), the debiased update target p(t) = eta*g(t) + e(t),
// and the virtual iterate that follows plain SGD.  Maintained only in
// diagnostic mode.
struct ShadowState {
  DenseSignal error;
  DenseSignal corrected_update;
  DenseSignal virtual_iterate;
};

// Maxima over a run of the three bookkeeping identities.  The first two
// are relative to 1 + the norm of the left-hand side; the shadow residual
// is a plain infinity norm.
struct DiagnosticsSummary {
  double max_feedback_identity = 0.0;     // feedback vs sensed error carry
  double max_measurement_identity = 0.0;  // sensed target vs assembled target
  double max_shadow_identity = 0.0;       // server iterate minus error carry
                                          // vs virtual iterate
  std::size_t rounds = 0;

  double worst() const {
    return std::max(max_feedback_identity,
                    std::max(max_measurement_identity, max_shadow_identity));
  }
};

struct RunConfig {
  std::size_t rounds = 0;  // T
  double step_size = 0.0;  // eta
  std::size_t sparsity = 0;  // K for the reconstruction (unused by vanilla)
  ChannelModel channel;
  std::uint64_t trial_key = 0;
  bool diagnostics = false;
  DenseSignal initial_point;  // empty = origin

  // Test hooks.  device_order permutes evaluation order only (aggregation
  // stays in index order); corrupt_feedback_round injects an error into
  // the accumulator after that round's update, for negative controls.
  std::vector<std::size_t> device_order;
  std::optional<std::size_t> corrupt_feedback_round;
  std::function<void(std::size_t round, const DenseSignal& x)> on_round;
};

struct RunResult {
  RunTrace trace;
  DenseSignal final_x;
  double final_objective = 0.0;
  double final_gradient_norm = 0.0;
  std::optional<DiagnosticsSummary> diagnostics;
};

// One device upload: sample the local gradient and sense it.
Measurement device_step(std::size_t device, const DenseSignal& x,
                        const SensingMatrix& phi, const GradientOracle& oracle,
                        rng::Stream& noise);

// Entrywise mean of the uploads plus one channel-noise draw.
Measurement aggregate(const std::vector<Measurement>& uploads,
                      const ChannelModel& channel, rng::Stream& noise);

struct ServerStep {
  SparseSignal update;  // Delta(t)
  ServerState next;
};

// The four server lines: assemble the debiased target from the feedback
// accumulator, reconstruct, descend, refresh the accumulator with the
// reconstruction residue.
ServerStep server_step(const ServerState& state, const Measurement& y_tilde,
                       const SensingMatrix& phi, std::size_t sparsity);

// Shadow recursion.  The error carry follows
//   e' = p - update + (eta Q / d_aug) Phi^T w,
// whose sensed image reproduces the feedback accumulator exactly when the
// rows are distinct (then Phi Phi^T = (d_aug/Q) I).  The virtual iterate
// steps by -eta*g minus the same channel pull, so it coincides with
// x - e every round; with w = 0 that is the plain SGD recursion.
ShadowState shadow_update(const ShadowState& shadow,
                          const DenseSignal& mean_gradient,
                          const SparseSignal& update,
                          const Measurement& channel_noise,
                          const SensingMatrix& phi, double step_size);

// Algorithm engines.  All three derive per-(round, device) gradient
// streams the same way from the trial key, so runs with equal keys see
// identical gradient draws round for round.
RunResult run_cs_sgd(const GradientOracle& oracle, const SensingMatrix& phi,
                     const RunConfig& config);
RunResult run_vanilla_sgd(const GradientOracle& oracle,
                          const RunConfig& config);
RunResult run_sketch_sgd(const GradientOracle& oracle,
                         const CountSketchParams& sketch,
                         const RunConfig& config);

}  // namespace csgrad
