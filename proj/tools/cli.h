// Copyright 2026 The nodedp Authors.
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

// Command-line front end: sample, estimate, audit, lower-bound, verify and
// sweep, each driven by a versioned JSON config.

#ifndef NODEDP_TOOLS_CLI_H_
#define NODEDP_TOOLS_CLI_H_

#include <ostream>

namespace nodedp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitCheckFailed = 2,  // an audit or verification check did not hold
  kExitRuntime = 3,
};

// Parses argv, runs the command and writes every artifact plus
// manifest.json under --out. Usage and logs go to `err`; a one-line summary
// goes to `out`.
int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);

}  // namespace nodedp::cli

#endif  // NODEDP_TOOLS_CLI_H_
