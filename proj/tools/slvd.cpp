#include <iostream>

#include "slvd/cli.hpp"

int main(int argc, char** argv) { return slvd::cli::run(argc, argv, std::cout, std::cerr); }
