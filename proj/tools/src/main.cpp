#include <iostream>

#include "rdf/cli/commands.hpp"

int main(int argc, char** argv) { return rdf::cli::run_cli(argc, argv, std::cout, std::cerr); }
