#include <iostream>

#include "netdyad/commands.hpp"

int main(int argc, char** argv) {
  return netdyad::run_cli(argc, argv, std::cout, std::cerr);
}
