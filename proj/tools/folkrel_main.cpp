#include <iostream>

#include "folkrel/cli.hpp"

int main(int argc, char** argv) { return folkrel::run_cli(argc, argv, std::cout, std::cerr); }
