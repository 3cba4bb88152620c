#include "csgrad/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "csgrad/config.hpp"
#include "csgrad/runner.hpp"

namespace csgrad {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"compressed-sensing gradient compression experiments"};
  app.require_subcommand(1);

  struct SubArgs {
    std::string config_path;
    std::string out_dir;
  };
  const std::vector<std::pair<std::string, Command>> commands = {
      {"run", Command::Run},
      {"sweep-noise", Command::SweepNoise},
      {"recon-bench", Command::ReconBench},
      {"diag", Command::Diag},
  };
  std::vector<SubArgs> args(commands.size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first);
    sub->add_option("--config", args[i].config_path, "experiment config file")
        ->required();
    sub->add_option("--out", args[i].out_dir,
                    "output directory (overrides output_path)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad usage is a config error
  }

  std::size_t selected = commands.size();
  for (std::size_t i = 0; i < commands.size(); ++i)
    if (subs[i]->parsed()) selected = i;

  try {
    const ExperimentConfig cfg = parse_config(read_file(args[selected].config_path));
    if (cfg.command != commands[selected].second)
      throw ConfigError("config: command key '" + to_string(cfg.command) +
                        "' does not match subcommand '" +
                        commands[selected].first + "'");
    execute(cfg, args[selected].out_dir);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace csgrad
