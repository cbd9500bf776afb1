#include <iostream>

#include "gconv/cli.hpp"

int main(int argc, char** argv) {
  return gconv::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
