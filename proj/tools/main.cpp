#include <iostream>

#include "bandalloc/cli.hpp"

int main(int argc, char** argv) { return bandalloc::cli::run(argc, argv, std::cout, std::cerr); }
