// SPDX-License-Identifier: Apache-2.0
#include <asflab/cli.hpp>

int main(int argc, char** argv) {
    return asflab::cli::run_cli(argc, argv, std::cout, std::cerr);
}
