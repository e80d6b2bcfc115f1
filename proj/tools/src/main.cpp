#include <iostream>

#include "spde_mlmc_cli/app.hpp"

int main(int argc, char** argv) { return spde_mlmc::cli::run_cli(argc, argv, std::cout, std::cerr); }
