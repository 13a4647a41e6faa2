#include "scwave/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return scwave::cmd_dispatch(args, std::cout, std::cerr);
}
