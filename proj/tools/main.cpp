#include "crowdest/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return crowdest::cli::run(argc, argv, std::cout, std::cerr);
}
