#include <iostream>
#include <string>
#include <vector>

#include "sdplr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sdplr::run_subcommand(std::move(args), std::cout, std::cerr);
}
