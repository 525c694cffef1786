#include <iostream>

#include "nlll/cli.hpp"

int main(int argc, char** argv) { return nlll::cli::run(argc, argv, std::cout, std::cerr); }
