#include <iostream>
#include <string>
#include <vector>

#include "csibn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return csibn::cli::run(args, std::cout, std::cerr);
}
