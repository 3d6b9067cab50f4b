#include <iostream>

#include "pvff/cli.hpp"

int main(int argc, char** argv) { return pvff::cli::run(argc, argv, std::cout, std::cerr); }
