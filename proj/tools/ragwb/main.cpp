#include <iostream>
#include <string>
#include <vector>

#include "ragwb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return ragwb::cli::run(args, std::cout, std::cerr);
}
