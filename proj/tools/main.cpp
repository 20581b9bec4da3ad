#include <iostream>

#include "dpdp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dpdp::cli::run(args, std::cout, std::cerr);
}
