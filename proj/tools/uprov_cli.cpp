#include <iostream>

#include "uprov/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return uprov::cli_main(args, std::cout, std::cerr);
}
