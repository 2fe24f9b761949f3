#include <iostream>

#include "robscatter/cli.hpp"

int main(int argc, char** argv) { return robscatter::run_cli(argc, argv, std::cout, std::cerr); }
