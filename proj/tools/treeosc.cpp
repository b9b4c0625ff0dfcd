#include <iostream>

#include "treeosc/cli/commands.hpp"

int main(int argc, char** argv) { return treeosc::cli::run(argc, argv, std::cout, std::cerr); }
