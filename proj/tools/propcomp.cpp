#include <iostream>
#include <string>
#include <vector>

#include "propcomp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return propcomp::cli::dispatch(args, std::cout, std::cerr);
}
