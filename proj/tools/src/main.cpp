// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "brownflow_cli/app.hpp"

int main(int argc, char** argv) { return brownflow::cli::run_cli(argc, argv, std::cout, std::cerr); }
