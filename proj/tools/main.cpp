#include <iostream>
#include <vector>

#include "cuspsieve/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cuspsieve::cli_main(args, std::cout, std::cerr);
}
