#include <iostream>

#include "fprw/cli.hpp"

int main(int argc, char** argv) { return fprw::run_cli(argc, argv, std::cout, std::cerr); }
