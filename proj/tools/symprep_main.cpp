#include <iostream>
#include <string>
#include <vector>

#include "symprep/cli.hpp"

int main(int argc, char** argv)
{
    return symprep::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
