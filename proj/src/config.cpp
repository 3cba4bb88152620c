#include "csgrad/config.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace csgrad {

double EtaRule::resolve(std::size_t rounds) const {
  if (fixed) return value;
  if (rounds == 0) return 0.0;
  return 1.0 / std::sqrt(static_cast<double>(rounds));
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config: key '" + key + "': " + what);
}

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config: malformed line (expected key=value): '" +
                          line + "'");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ConfigError("config: empty key in line: '" + line + "'");
      if (pairs_.count(key)) fail(key, "duplicate key");
      pairs_[key] = value;
    }
  }

  bool has(const std::string& key) const { return pairs_.count(key) != 0; }

  const std::string& require(const std::string& key) {
    seen_.insert(key);
    const auto it = pairs_.find(key);
    if (it == pairs_.end()) fail(key, "required key missing");
    return it->second;
  }

  const std::string* optional(const std::string& key) {
    seen_.insert(key);
    const auto it = pairs_.find(key);
    return it == pairs_.end() ? nullptr : &it->second;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : pairs_)
      if (!seen_.count(key)) fail(key, "unknown key");
  }

 private:
  std::map<std::string, std::string> pairs_;
  std::set<std::string> seen_;
};

std::size_t parse_size(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    fail(key, "expected a nonnegative integer, got '" + value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    fail(key, "expected a nonnegative integer, got '" + value + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    if (!std::isfinite(out)) throw std::invalid_argument(value);
    return out;
  } catch (const std::exception&) {
    fail(key, "expected a finite real number, got '" + value + "'");
  }
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(key, "empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) fail(key, "expected at least one value");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  fail(key, "expected true/false, got '" + value + "'");
}

Command parse_command(const std::string& value) {
  if (value == "run") return Command::Run;
  if (value == "sweep-noise") return Command::SweepNoise;
  if (value == "recon-bench") return Command::ReconBench;
  if (value == "diag") return Command::Diag;
  fail("command", "expected run|sweep-noise|recon-bench|diag, got '" + value +
                      "'");
}

Algorithm parse_algorithm(const std::string& value) {
  if (value == "cs_sgd") return Algorithm::CsSgd;
  if (value == "sketch_sgd") return Algorithm::SketchSgd;
  if (value == "vanilla_sgd") return Algorithm::VanillaSgd;
  fail("algorithm",
       "expected cs_sgd|sketch_sgd|vanilla_sgd, got '" + value + "'");
}

BaseTransformKind parse_base(const std::string& value) {
  if (value == "wht") return BaseTransformKind::Wht;
  if (value == "dct") return BaseTransformKind::Dct;
  fail("base_transform", "expected wht|dct, got '" + value + "'");
}

EtaRule parse_eta_rule(const std::string& value) {
  if (value == "one_over_sqrt_T") return EtaRule{false, 0.0};
  const std::string prefix = "fixed:";
  if (value.rfind(prefix, 0) == 0) {
    const double v = parse_double("eta_rule", value.substr(prefix.size()));
    if (v <= 0.0) fail("eta_rule", "fixed step size must be positive");
    return EtaRule{true, v};
  }
  fail("eta_rule", "expected one_over_sqrt_T or fixed:<value>, got '" + value +
                       "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  KeyValues kv(text);
  ExperimentConfig cfg;

  cfg.command = parse_command(kv.require("command"));
  cfg.master_seed = parse_u64("master_seed", kv.require("master_seed"));
  cfg.output_path = kv.require("output_path");
  if (cfg.output_path.empty()) fail("output_path", "must not be empty");

  if (const std::string* v = kv.optional("num_trials")) {
    cfg.num_trials = parse_size("num_trials", *v);
    if (cfg.num_trials == 0) fail("num_trials", "must be at least 1");
  }

  cfg.d = parse_size("d", kv.require("d"));
  if (cfg.d == 0) fail("d", "must be at least 1");
  const std::size_t d_aug = pow2_ceil(cfg.d);

  if (const std::string* v = kv.optional("base_transform"))
    cfg.base_transform = parse_base(*v);

  const bool is_bench = cfg.command == Command::ReconBench;
  if (is_bench) {
    cfg.K = parse_size("K", kv.require("K"));
    if (cfg.K == 0 || cfg.K > cfg.d) fail("K", "must satisfy 1 <= K <= d");
    cfg.lambdas = parse_double_list("lambdas", kv.require("lambdas"));
    for (double l : cfg.lambdas)
      if (l < 1.0) fail("lambdas", "compression rates must be >= 1");
    cfg.signal_nnz = parse_size("signal_nnz", kv.require("signal_nnz"));
    if (cfg.signal_nnz > cfg.d) fail("signal_nnz", "must be <= d");
    cfg.signal_noise_std =
        parse_double("signal_noise_std", kv.require("signal_noise_std"));
    if (cfg.signal_noise_std < 0.0) fail("signal_noise_std", "must be >= 0");
    kv.reject_unknown();
    return cfg;
  }

  cfg.algorithm = parse_algorithm(kv.require("algorithm"));
  if (cfg.command == Command::Diag && cfg.algorithm != Algorithm::CsSgd)
    fail("algorithm", "diag requires algorithm=cs_sgd");

  cfg.n = parse_size("n", kv.require("n"));
  if (cfg.n == 0) fail("n", "must be at least 1");
  cfg.T = parse_size("T", kv.require("T"));

  const bool needs_sparsity = cfg.algorithm != Algorithm::VanillaSgd;
  if (needs_sparsity) {
    cfg.K = parse_size("K", kv.require("K"));
    if (cfg.K == 0 || cfg.K > cfg.d) fail("K", "must satisfy 1 <= K <= d");
  }

  if (cfg.algorithm == Algorithm::CsSgd) {
    cfg.Q = parse_size("Q", kv.require("Q"));
    if (cfg.Q == 0 || cfg.Q > d_aug)
      fail("Q", "must satisfy 1 <= Q <= d_aug = " + std::to_string(d_aug));
  }

  if (cfg.algorithm == Algorithm::SketchSgd) {
    cfg.sketch_rows = parse_size("sketch_rows", kv.require("sketch_rows"));
    cfg.sketch_cols = parse_size("sketch_cols", kv.require("sketch_cols"));
    if (cfg.sketch_rows == 0) fail("sketch_rows", "must be at least 1");
    if (cfg.sketch_cols == 0) fail("sketch_cols", "must be at least 1");
  }

  if (const std::string* v = kv.optional("eta_rule"))
    cfg.eta_rule = parse_eta_rule(*v);

  if (const std::string* v = kv.optional("noise_std")) {
    cfg.noise_std = parse_double_list("noise_std", *v);
    for (double w : cfg.noise_std)
      if (w < 0.0) fail("noise_std", "noise levels must be >= 0");
    if (cfg.command != Command::SweepNoise && cfg.noise_std.size() != 1)
      fail("noise_std", "a list is only valid for sweep-noise");
  }

  if (const std::string* v = kv.optional("diagnostics"))
    cfg.diagnostics = parse_bool("diagnostics", *v);
  if (cfg.command == Command::Diag) cfg.diagnostics = true;

  kv.reject_unknown();
  return cfg;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::Run: return "run";
    case Command::SweepNoise: return "sweep-noise";
    case Command::ReconBench: return "recon-bench";
    case Command::Diag: return "diag";
  }
  return "?";
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::CsSgd: return "cs_sgd";
    case Algorithm::SketchSgd: return "sketch_sgd";
    case Algorithm::VanillaSgd: return "vanilla_sgd";
  }
  return "?";
}

std::string to_string(BaseTransformKind b) {
  return b == BaseTransformKind::Wht ? "wht" : "dct";
}

}  // namespace csgrad
