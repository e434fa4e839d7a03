#include <iostream>
#include <string>
#include <vector>

#include "tlsloss/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tlsloss::cli::run_cli(args, std::cout, std::cerr);
}
