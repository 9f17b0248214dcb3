#include <iostream>

#include "medclaim/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return medclaim::cli::run(args, std::cin, std::cout, std::cerr);
}
