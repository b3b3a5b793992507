#include <iostream>
#include <string>
#include <vector>

#include "procure/cli.hpp"

int main(int argc, char** argv) {
  return procure::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
