#include <unistd.h>

#include <iostream>
#include <string>
#include <vector>

#include "wnmine/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  wnmine::cli::Console console{std::cout, std::cerr, wnmine::cli::use_color(isatty(STDERR_FILENO) != 0)};
  return wnmine::cli::run(args, console);
}
