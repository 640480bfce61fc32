#include <iostream>
#include <string>
#include <vector>

#include "isacfb/cli_app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return isacfb::run_cli(args, std::cout, std::cerr);
}
