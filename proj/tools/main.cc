#include <iostream>
#include <string>
#include <vector>

#include "commands.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return leadrisk::cli::RunCli(args, std::cout, std::cerr);
}
