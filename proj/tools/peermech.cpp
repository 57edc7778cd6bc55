#include "peermech/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return peermech::cli::run(argc, argv, std::cout, std::cerr); }
