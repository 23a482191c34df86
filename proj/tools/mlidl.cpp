#include <iostream>

#include "mlidl/cli/cli.hpp"

int main(int argc, char** argv) {
    return mlidl::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
