// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "guidedgen/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return guidedgen::cli::run(args, std::cout, std::cerr);
}
