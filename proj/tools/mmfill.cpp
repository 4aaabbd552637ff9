#include <iostream>
#include <string>
#include <vector>

#include "mmfill/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mmfill::cli_main(args, std::cout, std::cerr);
}
