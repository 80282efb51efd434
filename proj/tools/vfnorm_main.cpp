// CLI entry point; all the work lives in vfnorm::io::run_command so tests can
// drive the same code path in-process.
#include <iostream>
#include <string>
#include <vector>

#include "vfnorm/problem_io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vfnorm::io::run_command(args, std::cout, std::cerr);
}
