#include "msdiff/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return msdiff::cli::run(argc, argv, std::cout, std::cerr); }
