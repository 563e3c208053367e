#include <iostream>

#include "amsa/cli.hpp"

int main(int argc, char** argv) { return amsa::cli::main_entry(argc, argv, std::cout, std::cerr); }
