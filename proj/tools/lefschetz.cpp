#include "lefschetz/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lefschetz::cli_main(argc, argv, std::cout, std::cerr); }
