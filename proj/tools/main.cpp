#include <iostream>

#include "catwalk/cli.hpp"

int main(int argc, char** argv)
{
    std::ios::sync_with_stdio(false);
    return catwalk::run_cli(argc, argv, std::cout, std::cerr);
}
