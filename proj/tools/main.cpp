#include "csgrad/cli.hpp"

int main(int argc, char** argv) { return csgrad::run_cli(argc, argv); }
