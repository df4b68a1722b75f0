#include <iostream>

#include "hfslock/cli.hpp"

int main(int argc, char** argv) { return hfslock::cli::run(argc, argv, std::cout, std::cerr); }
