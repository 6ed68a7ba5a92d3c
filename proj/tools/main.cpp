#include <iostream>

#include "mcqn/cli.hpp"

int main(int argc, char** argv) { return mcqn::run_cli(argc, argv, std::cout, std::cerr); }
