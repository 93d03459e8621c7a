#include <iostream>
#include <string>
#include <vector>

#include "subcurv/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return subcurv::run(args, std::cout, std::cerr);
}
