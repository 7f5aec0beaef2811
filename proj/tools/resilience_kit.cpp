#include <iostream>
#include <string>
#include <vector>

#include "reskit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return reskit::run_cli(args, std::cout, std::cerr);
}
