#include <iostream>

#include "aide/cli.hpp"

int main(int argc, char** argv) { return aide::run_cli(argc, argv, std::cout, std::cerr); }
