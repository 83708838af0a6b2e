#include <iostream>
#include <string>
#include <vector>

#include "nmext/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return nmext::cli::cli_run(args, std::cout);
}
