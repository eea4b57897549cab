#include <iostream>
#include <string>
#include <vector>

#include "cogsim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cogsim::cli::run(args, std::cout, std::cerr);
}
