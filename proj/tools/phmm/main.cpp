#include <iostream>

#include "phmm/cli.hpp"

int main(int argc, char** argv) {
  return phmm::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
