// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace guidedgen::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitOracle = 3;

// Entry point for `guidedgen <generate|eval|precompute|replay|presets> ...`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace guidedgen::cli
