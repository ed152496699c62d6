#include "peit/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return peit::cli::dispatch(argc, argv, std::cout, std::cerr);
}
