#include <iostream>

#include "rsarl/cli.hpp"

int main(int argc, char** argv) { return rsarl::run_cli(argc, argv, std::cout, std::cerr); }
