#include <iostream>

#include "approxlie/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return approxlie::run_cli(args, std::cout, std::cerr);
}
