#include "csgrad/fedopt.hpp"

#include <cmath>
#include <stdexcept>

namespace csgrad {

namespace {

std::optional<double> sparsity_or_null(const DenseSignal& x) {
  if (is_zero(x)) return std::nullopt;
  return sparsity_level(x);
}

std::vector<std::size_t> resolve_order(const RunConfig& config,
                                       std::size_t devices) {
  if (config.device_order.empty()) {
    std::vector<std::size_t> order(devices);
    for (std::size_t i = 0; i < devices; ++i) order[i] = i;
    return order;
  }
  if (config.device_order.size() != devices)
    throw std::invalid_argument("run config: device order length mismatch");
  return config.device_order;
}

DenseSignal initial_point(const RunConfig& config, std::size_t d) {
  if (config.initial_point.empty()) return DenseSignal(d, 0.0);
  if (config.initial_point.size() != d)
    throw std::invalid_argument("run config: initial point dimension mismatch");
  return config.initial_point;
}

// Mean of the slots in index order, independent of evaluation order.
DenseSignal index_order_mean(const std::vector<DenseSignal>& slots) {
  DenseSignal mean(slots.front().size(), 0.0);
  for (const DenseSignal& s : slots)
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += s[j];
  const double inv = 1.0 / static_cast<double>(slots.size());
  for (double& v : mean) v *= inv;
  return mean;
}

Measurement draw_channel_noise(const ChannelModel& channel, std::size_t q,
                               std::uint64_t trial_key, std::size_t round) {
  Measurement w(q, 0.0);
  if (channel.active()) {
    rng::Stream stream(rng::fold(trial_key, rng::kTagChannel, round));
    for (double& v : w) v = channel.noise_std * stream.next_gaussian();
  }
  return w;
}

}  // namespace

Measurement device_step(std::size_t device, const DenseSignal& x,
                        const SensingMatrix& phi, const GradientOracle& oracle,
                        rng::Stream& noise) {
  return phi.apply(oracle.sample_gradient(device, x, noise));
}

Measurement aggregate(const std::vector<Measurement>& uploads,
                      const ChannelModel& channel, rng::Stream& noise) {
  if (uploads.empty())
    throw std::invalid_argument("aggregate: no uploads to combine");
  const std::size_t q = uploads.front().size();
  Measurement out(q, 0.0);
  for (const Measurement& y : uploads) {
    if (y.size() != q)
      throw std::invalid_argument("aggregate: upload dimension mismatch");
    for (std::size_t i = 0; i < q; ++i) out[i] += y[i];
  }
  const double inv = 1.0 / static_cast<double>(uploads.size());
  for (double& v : out) v *= inv;
  if (channel.active())
    for (double& v : out) v += channel.noise_std * noise.next_gaussian();
  return out;
}

ServerStep server_step(const ServerState& state, const Measurement& y_tilde,
                       const SensingMatrix& phi, std::size_t sparsity) {
  if (y_tilde.size() != phi.measurements())
    throw std::invalid_argument("server_step: measurement length mismatch");
  const Measurement target =
      add_scaled(state.feedback, state.step_size, y_tilde);
  SparseSignal update = reconstruct(target, phi, sparsity);
  const DenseSignal update_dense = densify(update);
  ServerStep step;
  step.next.x = subtract(state.x, update_dense);
  step.next.feedback = subtract(target, phi.apply(update_dense));
  step.next.step_size = state.step_size;
  step.next.round = state.round + 1;
  step.update = std::move(update);
  return step;
}

ShadowState shadow_update(const ShadowState& shadow,
                          const DenseSignal& mean_gradient,
                          const SparseSignal& update,
                          const Measurement& channel_noise,
                          const SensingMatrix& phi, double step_size) {
  ShadowState next;
  next.corrected_update =
      add_scaled(shadow.error, step_size, mean_gradient);  // p = eta g + e
  next.error = subtract(next.corrected_update, densify(update));
  next.virtual_iterate =
      add_scaled(shadow.virtual_iterate, -step_size, mean_gradient);
  if (!is_zero(channel_noise)) {
    const double pull_scale = step_size *
                              static_cast<double>(phi.measurements()) /
                              static_cast<double>(phi.dim_aug);
    const DenseSignal pull = scaled(phi.adjoint(channel_noise), pull_scale);
    for (std::size_t j = 0; j < next.error.size(); ++j) {
      next.error[j] += pull[j];
      next.virtual_iterate[j] -= pull[j];
    }
  }
  return next;
}

RunResult run_cs_sgd(const GradientOracle& oracle, const SensingMatrix& phi,
                     const RunConfig& config) {
  const std::size_t d = oracle.dim();
  const std::size_t n = oracle.devices();
  if (phi.dim != d)
    throw std::invalid_argument("run_cs_sgd: sensing matrix dimension mismatch");
  const std::size_t q = phi.measurements();
  const std::vector<std::size_t> order = resolve_order(config, n);

  ServerState state{initial_point(config, d), Measurement(q, 0.0),
                    config.step_size, 1};
  ShadowState shadow{DenseSignal(d, 0.0), DenseSignal(d, 0.0), state.x};
  DiagnosticsSummary diag;

  RunResult result;
  result.trace.reserve(config.rounds);
  std::vector<DenseSignal> gradients(n);
  std::vector<Measurement> uploads(n);

  for (std::size_t t = 1; t <= config.rounds; ++t) {
    for (std::size_t slot = 0; slot < n; ++slot) {
      const std::size_t i = order[slot];
      rng::Stream stream(rng::fold(config.trial_key, rng::kTagGradient, t, i));
      gradients[i] = oracle.sample_gradient(i, state.x, stream);
      uploads[i] = phi.apply(gradients[i]);
    }
    const DenseSignal mean_gradient = index_order_mean(gradients);
    const Measurement noise = draw_channel_noise(config.channel, q,
                                                 config.trial_key, t);
    Measurement y_tilde = index_order_mean(uploads);
    for (std::size_t i = 0; i < q; ++i) y_tilde[i] += noise[i];

    const ServerStep step = server_step(state, y_tilde, phi, config.sparsity);

    MetricsRecord rec;
    rec.round = t;
    rec.objective_value = oracle.objective(state.x);
    rec.gradient_norm = l2_norm(oracle.exact_gradient(state.x));
    rec.gradient_sparsity = sparsity_or_null(mean_gradient);
    rec.update_nnz = step.update.entries.size();
    rec.feedback_norm = l2_norm(state.feedback);
    rec.recon_residual = l2_norm(step.next.feedback);

    if (config.diagnostics) {
      const ShadowState next_shadow = shadow_update(
          shadow, mean_gradient, step.update, noise, phi, config.step_size);
      rec.update_sparsity = sparsity_or_null(next_shadow.corrected_update);

      const double feedback_gap = l2_norm(
          subtract(state.feedback, phi.apply(shadow.error)));
      diag.max_feedback_identity =
          std::max(diag.max_feedback_identity,
                   feedback_gap / (1.0 + l2_norm(state.feedback)));

      const Measurement target =
          add_scaled(state.feedback, config.step_size, y_tilde);
      const Measurement assembled = add_scaled(
          phi.apply(next_shadow.corrected_update), config.step_size, noise);
      diag.max_measurement_identity =
          std::max(diag.max_measurement_identity,
                   l2_norm(subtract(target, assembled)) /
                       (1.0 + l2_norm(target)));

      diag.max_shadow_identity =
          std::max(diag.max_shadow_identity,
                   linf_norm(subtract(subtract(state.x, shadow.error),
                                      shadow.virtual_iterate)));
      shadow = next_shadow;
      diag.rounds = t;
    }

    state = step.next;
    if (config.corrupt_feedback_round && *config.corrupt_feedback_round == t)
      state.feedback[0] += 1e-3;
    if (config.on_round) config.on_round(t, state.x);
    result.trace.push_back(std::move(rec));
  }

  result.final_x = state.x;
  result.final_objective = oracle.objective(state.x);
  result.final_gradient_norm = l2_norm(oracle.exact_gradient(state.x));
  if (config.diagnostics) result.diagnostics = diag;
  return result;
}

RunResult run_vanilla_sgd(const GradientOracle& oracle,
                          const RunConfig& config) {
  const std::size_t d = oracle.dim();
  const std::size_t n = oracle.devices();
  const std::vector<std::size_t> order = resolve_order(config, n);

  DenseSignal x = initial_point(config, d);
  RunResult result;
  result.trace.reserve(config.rounds);
  std::vector<DenseSignal> gradients(n);

  for (std::size_t t = 1; t <= config.rounds; ++t) {
    for (std::size_t slot = 0; slot < n; ++slot) {
      const std::size_t i = order[slot];
      rng::Stream stream(rng::fold(config.trial_key, rng::kTagGradient, t, i));
      gradients[i] = oracle.sample_gradient(i, x, stream);
    }
    const DenseSignal mean_gradient = index_order_mean(gradients);

    MetricsRecord rec;
    rec.round = t;
    rec.objective_value = oracle.objective(x);
    rec.gradient_norm = l2_norm(oracle.exact_gradient(x));
    rec.gradient_sparsity = sparsity_or_null(mean_gradient);
    std::size_t nnz = 0;
    for (double v : mean_gradient)
      if (v != 0.0) ++nnz;
    rec.update_nnz = nnz;

    x = add_scaled(x, -config.step_size, mean_gradient);
    if (config.on_round) config.on_round(t, x);
    result.trace.push_back(std::move(rec));
  }

  result.final_x = x;
  result.final_objective = oracle.objective(x);
  result.final_gradient_norm = l2_norm(oracle.exact_gradient(x));
  return result;
}

RunResult run_sketch_sgd(const GradientOracle& oracle,
                         const CountSketchParams& sketch,
                         const RunConfig& config) {
  const std::size_t d = oracle.dim();
  const std::size_t n = oracle.devices();
  if (sketch.dim != d)
    throw std::invalid_argument("run_sketch_sgd: sketch dimension mismatch");
  const std::vector<std::size_t> order = resolve_order(config, n);
  const CountSketchOperator op(sketch);
  const std::size_t cells =
      static_cast<std::size_t>(sketch.rows) * sketch.cols;

  DenseSignal x = initial_point(config, d);
  std::vector<double> feedback(cells, 0.0);
  const std::vector<double> weights(n, 1.0 / static_cast<double>(n));

  RunResult result;
  result.trace.reserve(config.rounds);
  std::vector<DenseSignal> gradients(n);
  std::vector<SketchTable> tables(n);

  for (std::size_t t = 1; t <= config.rounds; ++t) {
    for (std::size_t slot = 0; slot < n; ++slot) {
      const std::size_t i = order[slot];
      rng::Stream stream(rng::fold(config.trial_key, rng::kTagGradient, t, i));
      gradients[i] = oracle.sample_gradient(i, x, stream);
      tables[i] = op.compress(gradients[i]);
    }
    const DenseSignal mean_gradient = index_order_mean(gradients);

    SketchTable combined = cs_combine(tables, weights);
    if (config.channel.active()) {
      rng::Stream stream(rng::fold(config.trial_key, rng::kTagChannel, t));
      for (double& v : combined.cells)
        v += config.channel.noise_std * stream.next_gaussian();
    }

    SketchTable target = combined;
    for (std::size_t c = 0; c < cells; ++c)
      target.cells[c] = config.step_size * combined.cells[c] + feedback[c];

    const SparseSignal update = op.reconstruct(target, config.sparsity);
    const DenseSignal update_dense = densify(update);
    const SketchTable resensed = op.compress(update_dense);

    MetricsRecord rec;
    rec.round = t;
    rec.objective_value = oracle.objective(x);
    rec.gradient_norm = l2_norm(oracle.exact_gradient(x));
    rec.gradient_sparsity = sparsity_or_null(mean_gradient);
    rec.update_nnz = update.entries.size();
    rec.feedback_norm = l2_norm(feedback);

    x = subtract(x, update_dense);
    for (std::size_t c = 0; c < cells; ++c)
      feedback[c] = target.cells[c] - resensed.cells[c];
    rec.recon_residual = l2_norm(feedback);

    if (config.on_round) config.on_round(t, x);
    result.trace.push_back(std::move(rec));
  }

  result.final_x = x;
  result.final_objective = oracle.objective(x);
  result.final_gradient_norm = l2_norm(oracle.exact_gradient(x));
  return result;
}

}  // namespace csgrad
