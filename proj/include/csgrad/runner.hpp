#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "csgrad/config.hpp"
#include "csgrad/fedopt.hpp"

namespace csgrad {

// Worker-thread cap: CSGRAD_THREADS when set (clamped to >= 1), otherwise
// the hardware concurrency.  Outputs are byte-identical for any value.
std::size_t worker_thread_count();

// Runs fn(0..count-1), possibly concurrently; each index owns its slot,
// results never depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Fixed trace schema shared by every engine:
//   t,f,grad_norm,sp_g,sp_p,delta_nnz,feedback_norm,recon_residual
// one row per round, reals at 17 significant digits, absent values empty.
std::string trace_to_csv(const RunTrace& trace);

// 17-significant-digit decimal rendering; round-trips 64-bit reals.
std::string format_double(double v);

struct DiagReport {
  DiagnosticsSummary summary;
  double threshold = 1e-8;
  bool pass = false;
};

// Command drivers.  Each writes its files under out_dir and is
// deterministic in (config, master seed) regardless of thread count.
//   run:         trace_trial<k>.csv per trial + summary.json
//   sweep-noise: sweep.csv (noise_std,trial,final_f,final_grad_norm) + summary.json
//   recon-bench: recon.csv (lambda,method,trial,rel_error) + summary.json
//   diag:        diag.json, report also printed to stdout
void run_experiment(const ExperimentConfig& config,
                    const std::filesystem::path& out_dir);
void sweep_noise(const ExperimentConfig& config,
                 const std::filesystem::path& out_dir);
void recon_bench(const ExperimentConfig& config,
                 const std::filesystem::path& out_dir);
DiagReport diag(const ExperimentConfig& config,
                const std::filesystem::path& out_dir);

// Dispatches on config.command; out_override, when nonempty, replaces the
// config's output_path.
void execute(const ExperimentConfig& config, const std::string& out_override);

}  // namespace csgrad
