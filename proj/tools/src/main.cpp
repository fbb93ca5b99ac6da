#include "gazeflow_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return gazeflow::cli::run(argc, argv, std::cout, std::cerr);
}
