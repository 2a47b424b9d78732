#include <iostream>

#include "trimix/cli/cli.hpp"

int main(int argc, char** argv) {
  return trimix::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
