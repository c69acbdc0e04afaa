#include <iostream>

#include "xbn/cli.hpp"
#include "xbn/logging.hpp"

int main(int argc, char** argv) {
    xbn::init_logging();
    return xbn::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
