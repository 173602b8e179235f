#include <iostream>

#include "udisc/cli.hpp"

int main(int argc, char** argv) { return udisc::cli_main(argc, argv, std::cout, std::cerr); }
