#include <crjet/cli.hpp>

#include <iostream>

int main(int argc, char **argv)
{
    return crjet::run_cli(argc, argv, std::cout, std::cerr);
}
