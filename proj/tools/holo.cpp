#include <iostream>

#include "holo/cli.hpp"

int main(int argc, char** argv) {
  return holo::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
