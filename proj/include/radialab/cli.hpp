// Copyright 2026 The radialab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>

namespace radialab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// radialab <experiment> [--config file.toml] [--shape NAME[,NAME]]
///   [--params k=v,...] [--shape-lambda EXPR] [--dims csv] [--n INT]
///   [--replicates INT] [--seed U64] [--tol FLOAT] [--out PATH]
///   [--format csv|json] [--dump-samples DIR]
///
/// Returns 0 on success, 2 for configuration errors and 3 for numerical
/// failures. The summary goes to `out`, diagnostics to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

}  // namespace radialab
