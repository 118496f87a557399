#include "gjrvol/cli.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    const std::vector<std::string> args(argv, argv + argc);
    return gjrvol::cli::main_entry(args, std::cout, std::cerr);
}
