#include <iostream>

#include "avgcost/cli/commands.hpp"

int main(int argc, char** argv) { return avgcost::cli::run(argc, argv, std::cout, std::cerr); }
