#include "rsmimo/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return rsmimo::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
