#include "l1hr/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return l1hr::runCli(argc, argv, std::cout, std::cerr); }
