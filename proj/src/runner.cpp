#include "csgrad/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "csgrad/synth.hpp"

namespace csgrad {

namespace {

using ordered_json = nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ChannelModel make_channel(double noise_std) {
  return ChannelModel{ChannelModel::Kind::IidGaussian, noise_std};
}

// Trial artifacts kept in memory until all workers finish, so files land
// in a fixed order no matter how trials were scheduled.
struct TrialOutput {
  RunResult result;
  std::string trace_csv;
};

RunResult run_one(const ExperimentConfig& cfg, const SyntheticOracle& oracle,
                  std::uint64_t trial_key, double noise_std,
                  bool want_diagnostics) {
  RunConfig rc;
  rc.rounds = cfg.T;
  rc.step_size = cfg.eta_rule.resolve(cfg.T);
  rc.sparsity = cfg.K;
  rc.channel = make_channel(noise_std);
  rc.trial_key = trial_key;
  switch (cfg.algorithm) {
    case Algorithm::CsSgd: {
      rc.diagnostics = want_diagnostics;
      const SensingMatrix phi = generate_sensing_matrix(
          cfg.base_transform, cfg.d, cfg.Q, trial_key);
      return run_cs_sgd(oracle, phi, rc);
    }
    case Algorithm::SketchSgd: {
      const CountSketchParams sketch{
          static_cast<std::uint32_t>(cfg.sketch_rows),
          static_cast<std::uint32_t>(cfg.sketch_cols),
          static_cast<std::uint32_t>(cfg.d), trial_key};
      return run_sketch_sgd(oracle, sketch, rc);
    }
    case Algorithm::VanillaSgd:
      return run_vanilla_sgd(oracle, rc);
  }
  throw std::logic_error("run_one: unreachable");
}

std::size_t uplink_bytes(const ExperimentConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::CsSgd: return cfg.Q * 8;
    case Algorithm::SketchSgd: return cfg.sketch_rows * cfg.sketch_cols * 8;
    case Algorithm::VanillaSgd: return cfg.d * 8;
  }
  return 0;
}

std::optional<double> mean_tail_update_sparsity(const RunTrace& trace,
                                                std::size_t window) {
  if (trace.empty()) return std::nullopt;
  const std::size_t begin = trace.size() > window ? trace.size() - window : 0;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = begin; i < trace.size(); ++i) {
    if (trace[i].update_sparsity) {
      sum += *trace[i].update_sparsity;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

ordered_json config_echo(const ExperimentConfig& cfg) {
  ordered_json j;
  j["command"] = to_string(cfg.command);
  if (cfg.command != Command::ReconBench) {
    j["algorithm"] = to_string(cfg.algorithm);
    j["n"] = cfg.n;
    j["T"] = cfg.T;
  }
  j["d"] = cfg.d;
  if (cfg.K > 0) j["K"] = cfg.K;
  if (cfg.algorithm == Algorithm::CsSgd && cfg.command != Command::ReconBench)
    j["Q"] = cfg.Q;
  if (cfg.algorithm == Algorithm::SketchSgd) {
    j["sketch_rows"] = cfg.sketch_rows;
    j["sketch_cols"] = cfg.sketch_cols;
  }
  j["base_transform"] = to_string(cfg.base_transform);
  j["master_seed"] = cfg.master_seed;
  j["num_trials"] = cfg.num_trials;
  return j;
}

ordered_json diagnostics_json(const DiagnosticsSummary& diag) {
  ordered_json j;
  j["max_feedback_identity"] = diag.max_feedback_identity;
  j["max_measurement_identity"] = diag.max_measurement_identity;
  j["max_shadow_identity"] = diag.max_shadow_identity;
  j["rounds"] = diag.rounds;
  return j;
}

}  // namespace

std::size_t worker_thread_count() {
  if (const char* env = std::getenv("CSGRAD_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || v == 0)
      throw std::runtime_error("CSGRAD_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min(worker_thread_count(), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_optional(std::string& out, const std::optional<double>& v) {
  if (v) out += format_double(*v);
}

}  // namespace

std::string trace_to_csv(const RunTrace& trace) {
  std::string out =
      "t,f,grad_norm,sp_g,sp_p,delta_nnz,feedback_norm,recon_residual\n";
  for (const MetricsRecord& rec : trace) {
    out += std::to_string(rec.round);
    out += ',';
    out += format_double(rec.objective_value);
    out += ',';
    out += format_double(rec.gradient_norm);
    out += ',';
    append_optional(out, rec.gradient_sparsity);
    out += ',';
    append_optional(out, rec.update_sparsity);
    out += ',';
    out += std::to_string(rec.update_nnz);
    out += ',';
    append_optional(out, rec.feedback_norm);
    out += ',';
    append_optional(out, rec.recon_residual);
    out += '\n';
  }
  return out;
}

void run_experiment(const ExperimentConfig& cfg,
                    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const SyntheticOracle oracle(
      make_problem(cfg.d, cfg.n, rng::fold(cfg.master_seed, rng::kTagProblem)));
  const double noise_std = cfg.noise_std.front();

  std::vector<TrialOutput> outputs(cfg.num_trials);
  parallel_for(cfg.num_trials, [&](std::size_t trial) {
    const std::uint64_t trial_key =
        rng::fold(cfg.master_seed, rng::kTagTrial, trial);
    TrialOutput out;
    out.result = run_one(cfg, oracle, trial_key, noise_std, cfg.diagnostics);
    out.trace_csv = trace_to_csv(out.result.trace);
    outputs[trial] = std::move(out);
  });

  for (std::size_t trial = 0; trial < cfg.num_trials; ++trial)
    write_file(out_dir / ("trace_trial" + std::to_string(trial) + ".csv"),
               outputs[trial].trace_csv);

  ordered_json summary = config_echo(cfg);
  summary["eta"] = cfg.eta_rule.resolve(cfg.T);
  summary["noise_std"] = noise_std;
  const std::size_t bytes = uplink_bytes(cfg);
  summary["uplink_bytes_per_device_per_round"] = bytes;
  summary["compression_rate"] =
      static_cast<double>(cfg.d * 8) / static_cast<double>(bytes);
  ordered_json trials = ordered_json::array();
  double mean_final = 0.0;
  for (std::size_t trial = 0; trial < cfg.num_trials; ++trial) {
    const RunResult& r = outputs[trial].result;
    ordered_json tj;
    tj["trial"] = trial;
    tj["final_f"] = r.final_objective;
    tj["final_grad_norm"] = r.final_gradient_norm;
    const auto sp_tail = mean_tail_update_sparsity(r.trace, 100);
    tj["mean_sp_p_last100"] = sp_tail ? ordered_json(*sp_tail) : nullptr;
    tj["diagnostics"] =
        r.diagnostics ? diagnostics_json(*r.diagnostics) : nullptr;
    trials.push_back(std::move(tj));
    mean_final += r.final_objective;
  }
  summary["trials"] = std::move(trials);
  summary["mean_final_f"] = mean_final / static_cast<double>(cfg.num_trials);
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

void sweep_noise(const ExperimentConfig& cfg,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const SyntheticOracle oracle(
      make_problem(cfg.d, cfg.n, rng::fold(cfg.master_seed, rng::kTagProblem)));

  const std::size_t levels = cfg.noise_std.size();
  const std::size_t total = levels * cfg.num_trials;
  std::vector<RunResult> results(total);
  parallel_for(total, [&](std::size_t task) {
    const std::size_t level = task / cfg.num_trials;
    const std::size_t trial = task % cfg.num_trials;
    const std::uint64_t trial_key =
        rng::fold(cfg.master_seed, rng::kTagSweep, level, trial);
    results[task] =
        run_one(cfg, oracle, trial_key, cfg.noise_std[level], cfg.diagnostics);
  });

  std::string csv = "noise_std,trial,final_f,final_grad_norm\n";
  ordered_json entries = ordered_json::array();
  for (std::size_t level = 0; level < levels; ++level) {
    ordered_json entry;
    entry["noise_std"] = cfg.noise_std[level];
    ordered_json finals = ordered_json::array();
    double mean_final = 0.0;
    for (std::size_t trial = 0; trial < cfg.num_trials; ++trial) {
      const RunResult& r = results[level * cfg.num_trials + trial];
      csv += format_double(cfg.noise_std[level]);
      csv += ',';
      csv += std::to_string(trial);
      csv += ',';
      csv += format_double(r.final_objective);
      csv += ',';
      csv += format_double(r.final_gradient_norm);
      csv += '\n';
      finals.push_back(r.final_objective);
      mean_final += r.final_objective;
    }
    entry["final_f_per_trial"] = std::move(finals);
    entry["mean_final_f"] =
        mean_final / static_cast<double>(cfg.num_trials);
    entries.push_back(std::move(entry));
  }
  write_file(out_dir / "sweep.csv", csv);

  ordered_json summary = config_echo(cfg);
  summary["eta"] = cfg.eta_rule.resolve(cfg.T);
  summary["noise_levels"] = cfg.noise_std;
  summary["entries"] = std::move(entries);
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

void recon_bench(const ExperimentConfig& cfg,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::size_t d = cfg.d;
  const std::size_t d_aug = pow2_ceil(d);

  std::vector<DenseSignal> signals(cfg.num_trials);
  for (std::size_t trial = 0; trial < cfg.num_trials; ++trial) {
    rng::Stream stream(rng::fold(cfg.master_seed, rng::kTagSignal, trial));
    signals[trial] =
        make_recon_signal(d, cfg.signal_nnz, cfg.signal_noise_std, stream);
  }

  // One sensing matrix and one sketch operator per compression rate,
  // shared by all trials.
  const std::size_t levels = cfg.lambdas.size();
  std::vector<SensingMatrix> phis;
  std::vector<CountSketchParams> sketches;
  phis.reserve(levels);
  sketches.reserve(levels);
  for (std::size_t li = 0; li < levels; ++li) {
    const double lambda = cfg.lambdas[li];
    const std::size_t q = std::min(
        d_aug, std::max<std::size_t>(
                   1, static_cast<std::size_t>(
                          std::ceil(static_cast<double>(d) / lambda))));
    phis.push_back(generate_sensing_matrix(
        cfg.base_transform, d, q,
        rng::fold(cfg.master_seed, rng::kTagMatrix, li)));
    const std::size_t cols = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::ceil(static_cast<double>(d) / (5.0 * lambda))));
    sketches.push_back(CountSketchParams{
        5, static_cast<std::uint32_t>(cols), static_cast<std::uint32_t>(d),
        rng::fold(cfg.master_seed, rng::kTagSketch, li)});
  }

  // Task layout: per rate, FIHT trials then count-sketch trials.
  const std::size_t per_level = 2 * cfg.num_trials;
  std::vector<std::optional<double>> errors(levels * per_level);
  parallel_for(levels * per_level, [&](std::size_t task) {
    const std::size_t li = task / per_level;
    const std::size_t rest = task % per_level;
    const bool is_fiht = rest < cfg.num_trials;
    const std::size_t trial = rest % cfg.num_trials;
    const DenseSignal& g = signals[trial];
    const double energy = squared_l2_norm(g);
    if (energy == 0.0) {
      errors[task] = std::nullopt;  // relative error undefined
      return;
    }
    DenseSignal estimate;
    if (is_fiht) {
      estimate = densify(reconstruct(phis[li].apply(g), phis[li], cfg.K));
    } else {
      const CountSketchOperator op(sketches[li]);
      estimate = densify(op.reconstruct(op.compress(g), cfg.K));
    }
    errors[task] = squared_l2_norm(subtract(g, estimate)) / energy;
  });

  std::string csv = "lambda,method,trial,rel_error\n";
  ordered_json levels_json = ordered_json::array();
  for (std::size_t li = 0; li < levels; ++li) {
    double mean_fiht = 0.0;
    double mean_sketch = 0.0;
    std::size_t n_fiht = 0;
    std::size_t n_sketch = 0;
    for (std::size_t m = 0; m < 2; ++m) {
      const char* method = m == 0 ? "fiht" : "count_sketch";
      for (std::size_t trial = 0; trial < cfg.num_trials; ++trial) {
        const auto& err = errors[li * per_level + m * cfg.num_trials + trial];
        csv += format_double(cfg.lambdas[li]);
        csv += ',';
        csv += method;
        csv += ',';
        csv += std::to_string(trial);
        csv += ',';
        if (err) csv += format_double(*err);
        csv += '\n';
        if (err) {
          if (m == 0) {
            mean_fiht += *err;
            ++n_fiht;
          } else {
            mean_sketch += *err;
            ++n_sketch;
          }
        }
      }
    }
    ordered_json lj;
    lj["lambda"] = cfg.lambdas[li];
    lj["Q"] = phis[li].measurements();
    lj["sketch_rows"] = sketches[li].rows;
    lj["sketch_cols"] = sketches[li].cols;
    lj["mean_rel_error_fiht"] =
        n_fiht ? ordered_json(mean_fiht / static_cast<double>(n_fiht))
               : nullptr;
    lj["mean_rel_error_count_sketch"] =
        n_sketch ? ordered_json(mean_sketch / static_cast<double>(n_sketch))
                 : nullptr;
    levels_json.push_back(std::move(lj));
  }
  write_file(out_dir / "recon.csv", csv);

  ordered_json summary = config_echo(cfg);
  summary["signal_nnz"] = cfg.signal_nnz;
  summary["signal_noise_std"] = cfg.signal_noise_std;
  summary["lambdas"] = cfg.lambdas;
  summary["levels"] = std::move(levels_json);
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
}

DiagReport diag(const ExperimentConfig& cfg,
                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const SyntheticOracle oracle(
      make_problem(cfg.d, cfg.n, rng::fold(cfg.master_seed, rng::kTagProblem)));
  const double noise_std = cfg.noise_std.front();

  std::vector<DiagnosticsSummary> per_trial(cfg.num_trials);
  parallel_for(cfg.num_trials, [&](std::size_t trial) {
    const std::uint64_t trial_key =
        rng::fold(cfg.master_seed, rng::kTagTrial, trial);
    const RunResult r = run_one(cfg, oracle, trial_key, noise_std, true);
    per_trial[trial] = *r.diagnostics;
  });

  DiagReport report;
  for (const DiagnosticsSummary& s : per_trial) {
    report.summary.max_feedback_identity = std::max(
        report.summary.max_feedback_identity, s.max_feedback_identity);
    report.summary.max_measurement_identity = std::max(
        report.summary.max_measurement_identity, s.max_measurement_identity);
    report.summary.max_shadow_identity =
        std::max(report.summary.max_shadow_identity, s.max_shadow_identity);
    report.summary.rounds = std::max(report.summary.rounds, s.rounds);
  }
  report.pass = report.summary.worst() <= report.threshold;

  ordered_json j = config_echo(cfg);
  j["eta"] = cfg.eta_rule.resolve(cfg.T);
  j["noise_std"] = noise_std;
  j["threshold"] = report.threshold;
  j["max_feedback_identity"] = report.summary.max_feedback_identity;
  j["max_measurement_identity"] = report.summary.max_measurement_identity;
  j["max_shadow_identity"] = report.summary.max_shadow_identity;
  j["pass"] = report.pass;
  write_file(out_dir / "diag.json", j.dump(2) + "\n");

  const auto line = [&](const char* name, double value) {
    std::cout << name << " max residual " << format_double(value)
              << " (threshold " << format_double(report.threshold) << "): "
              << (value <= report.threshold ? "PASS" : "FAIL") << "\n";
  };
  line("feedback identity", report.summary.max_feedback_identity);
  line("measurement identity", report.summary.max_measurement_identity);
  line("shadow identity", report.summary.max_shadow_identity);
  return report;
}

void execute(const ExperimentConfig& cfg, const std::string& out_override) {
  const std::filesystem::path out_dir =
      out_override.empty() ? std::filesystem::path(cfg.output_path)
                           : std::filesystem::path(out_override);
  const auto start = std::chrono::steady_clock::now();
  switch (cfg.command) {
    case Command::Run:
      run_experiment(cfg, out_dir);
      break;
    case Command::SweepNoise:
      sweep_noise(cfg, out_dir);
      break;
    case Command::ReconBench:
      recon_bench(cfg, out_dir);
      break;
    case Command::Diag:
      diag(cfg, out_dir);
      break;
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  std::cout << to_string(cfg.command) << " completed in " << elapsed.count()
            << " s, outputs in " << out_dir.string() << "\n";
}

}  // namespace csgrad
