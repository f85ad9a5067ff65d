#include <iostream>

#include "cvxdef/cli.hpp"

int main(int argc, char** argv) { return cvxdef::run_cli(argc, argv, std::cout, std::cerr); }
