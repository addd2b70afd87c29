#include <iostream>

#include "transg_cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return transg::cli::run(args, std::cout, std::cerr);
}
