#include <iostream>
#include <string>
#include <vector>

#include "radneumann/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return radneumann::cli::run(args, std::cout, std::cerr);
}
