#include <iostream>

#include "rmopt/cli.hpp"

int main(int argc, char** argv) { return rmopt::cli::run(argc, argv, std::cout, std::cerr); }
