#include <iostream>

#include "qmc/bench.hpp"

int main(int argc, char** argv) { return qmc::cli_dispatch(argc, argv, std::cout, std::cerr); }
