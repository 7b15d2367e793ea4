#include <iostream>

#include "hfl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hfl::cli::run(args, std::cout, std::cerr);
}
