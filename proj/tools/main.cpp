// SPDX-License-Identifier: Apache-2.0
#include "actorforge/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return actorforge::cli::run(argc, argv, std::cout, std::cerr); }
