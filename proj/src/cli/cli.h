// Copyright 2026 The coheval Authors.
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

#ifndef COHEVAL_CLI_CLI_H_
#define COHEVAL_CLI_CLI_H_

#include <ostream>

namespace coheval::cli {

// Exit statuses of the coheval tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,          // malformed data, bridge or I/O failure
  kUsage = 2,            // bad flags, missing input file or provider
  kUnreachableRatio = 3, // synth cannot realize the label ratios
  kNoMatch = 4,          // no conversation id shared with the ratings
};

// Parses argv and runs one subcommand: synth, score, nli or correlate.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace coheval::cli

#endif  // COHEVAL_CLI_CLI_H_
