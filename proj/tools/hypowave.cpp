#include <iostream>

#include "hypowave/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hypowave::cli::run(args, std::cout, std::cerr);
}
