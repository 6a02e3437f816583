#include <iostream>
#include <string>
#include <vector>

#include "ewens/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ewens::cli::run_cli(args, std::cout, std::cerr);
}
