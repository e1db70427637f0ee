// SPDX-License-Identifier: Apache-2.0
#include "nextcell/cli.hpp"

int main(int argc, char** argv) { return nextcell::cli::run(argc, argv); }
