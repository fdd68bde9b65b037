#include <iostream>

#include "canary/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return canary::run_cli(args, std::cout, std::cerr);
}
