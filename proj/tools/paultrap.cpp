#include <iostream>

#include "paultrap/cli/app.hpp"

int main(int argc, char** argv) {
  return paultrap::cli::main_entry({argv + 1, argv + argc}, std::cout, std::cerr);
}
