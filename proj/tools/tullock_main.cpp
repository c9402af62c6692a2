#include <vector>

#include "tullock/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tullock::cli::run_cli(args);
}
