#include <iostream>

#include "spellscan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spellscan::run_cli(args, std::cout, std::cerr);
}
