// Copyright 2026 The mmtqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef MMTQA_CLI_HPP
#define MMTQA_CLI_HPP

#include <ostream>
#include <string>

namespace mmtqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNonConvergence = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "MMTQA_OUTPUT_DIR";

enum class Quantity { kNumber, kAngle, kLength, kTime };

/// Parses "1.7mrad", "0.24deg", "1.49mm", "30min", ... into SI base units
/// (rad, m, s). A bare number is taken in base units. Throws InvalidArgument.
double parse_quantity(const std::string& text, Quantity kind);

/// Runs the command line; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmtqa::cli

#endif  // MMTQA_CLI_HPP
