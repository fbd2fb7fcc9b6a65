#include <iostream>
#include <string>
#include <vector>

#include "featwarp/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return featwarp::run_cli(args, std::cout, std::cerr);
}
