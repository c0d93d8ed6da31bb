#include <iostream>

#include "indefcanon/cli.hpp"

int main(int argc, char** argv) { return indefcanon::cli::run(argc, argv, std::cout, std::cerr); }
