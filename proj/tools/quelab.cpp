#include <iostream>

#include "quelab/cli.hpp"

int main(int argc, char** argv) { return quelab::cli::dispatch(argc, argv, std::cout, std::cerr); }
