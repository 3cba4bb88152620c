#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "csgrad/transform.hpp"

namespace csgrad {

enum class Command { Run, SweepNoise, ReconBench, Diag };
enum class Algorithm { CsSgd, SketchSgd, VanillaSgd };

struct EtaRule {
  bool fixed = false;   // false: eta = 1/sqrt(T)
  double value = 0.0;   // used when fixed

  double resolve(std::size_t rounds) const;
};

// Parsed and validated experiment description.  The on-disk format is
// flat `key=value` lines with `#` comments; unknown keys are rejected and
// every violation message names the offending key.
struct ExperimentConfig {
  Command command = Command::Run;
  Algorithm algorithm = Algorithm::CsSgd;
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t T = 0;
  std::size_t K = 0;
  std::size_t Q = 0;
  EtaRule eta_rule;
  std::vector<double> noise_std{0.0};  // single value, or the sweep list
  std::size_t sketch_rows = 0;
  std::size_t sketch_cols = 0;
  BaseTransformKind base_transform = BaseTransformKind::Wht;
  std::uint64_t master_seed = 0;
  std::size_t num_trials = 1;
  std::string output_path;
  bool diagnostics = true;

  // recon-bench only
  std::vector<double> lambdas;
  std::size_t signal_nnz = 0;
  double signal_noise_std = 0.0;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::string& text);

std::string to_string(Command c);
std::string to_string(Algorithm a);
std::string to_string(BaseTransformKind b);

}  // namespace csgrad
