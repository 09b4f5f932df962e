#include <iostream>

#include "switchtaylor/cli.hpp"

int main(int argc, char** argv) {
  return switchtaylor::cli::run(argc, argv, std::cout, std::cerr);
}
