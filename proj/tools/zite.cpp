#include <iostream>

#include "zite/cli.hpp"

int main(int argc, char** argv) { return zite::cli::run(argc, argv, std::cout, std::cerr); }
