#include <iostream>
#include <string>
#include <vector>

#include "mrt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mrt::run_cli(args, std::cout, std::cerr);
}
