#include "tilings/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tilings::cli::run_cli(argc, argv, std::cout, std::cerr); }
