#include <iostream>

#include "gbs/cli.hpp"

int main(int argc, char** argv) { return gbs::run_command(argc, argv, std::cout, std::cerr); }
