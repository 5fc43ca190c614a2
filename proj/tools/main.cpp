#include <iostream>

#include "bellcert/cli.hpp"

int main(int argc, char** argv) {
  return bellcert::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
