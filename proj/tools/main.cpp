// Copyright 2026 The Threatsmith Authors
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#include <iostream>
#include <string>
#include <vector>

#include "threatsmith/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return threatsmith::cli::run_cli(args, std::cout, std::cerr);
}
