#include <iostream>
#include <string>
#include <vector>

#include "conga/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return conga::cli::run(args, std::cout, std::cerr);
}
