#include <iostream>

#include "gsmauth/cli.hpp"

int main(int argc, char** argv) { return gsmauth::cli::main_entry(argc, argv, std::cout, std::cerr); }
