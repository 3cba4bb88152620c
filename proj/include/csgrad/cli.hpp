#pragma once

namespace csgrad {

// Full command-line entry point; exit codes 0 (ok), 1 (config error),
// 2 (runtime error).
int run_cli(int argc, const char* const* argv);

}  // namespace csgrad
