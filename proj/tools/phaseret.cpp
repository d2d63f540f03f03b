#include <iostream>
#include <string>
#include <vector>

#include "phaseret/commands.hpp"

int main(int argc, char** argv) {
  return phaseret::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
