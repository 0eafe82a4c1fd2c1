#include <iostream>

#include "fracfem/cli.hpp"

int main(int argc, char** argv) { return fracfem::run_cli(argc, argv, std::cout, std::cerr); }
