#include <iostream>

#include "lazypair/cli.hpp"

int main(int argc, char** argv) {
  return lazypair::cli::run(argc, argv, std::cout, std::cerr);
}
