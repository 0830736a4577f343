#include <iostream>
#include <string>
#include <vector>

#include "dali/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dali::cli::dispatch(args, std::cin, std::cout, std::cerr);
}
