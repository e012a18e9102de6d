#include <iostream>

#include "hqmc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hqmc::cli::run(args, std::cout, std::cerr);
}
