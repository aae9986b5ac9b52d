#include <iostream>
#include <string>
#include <vector>

#include "spsing/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return spsing::run_cli(args, std::cout, std::cerr);
}
