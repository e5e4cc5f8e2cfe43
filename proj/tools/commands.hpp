// Copyright 2026 The vmsim Authors
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


// simctl subcommands. Each returns the process exit status.

#ifndef VMSIM_TOOLS_COMMANDS_HPP_
#define VMSIM_TOOLS_COMMANDS_HPP_

#include <string>

namespace simctl {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIntegration = 3;
inline constexpr int kExitIo = 4;

struct CommonOptions {
  std::string config_path;  // empty: built-in defaults
  std::string scenario = "validation";
  std::string mode = "cooperative";
  double duration = 0.0;    // s; 0 selects the command's default
  std::string out_dir;
  std::string bind = "127.0.0.1:8765";
  std::string input;        // replay: telemetry CSV to read
};

int RunCommand(const CommonOptions& o);
int ServeCommand(const CommonOptions& o);
int ReplayCommand(const CommonOptions& o);

// Applies SIMCTL_LOG (trace, debug, info, warn, error, critical, off) to a
// stderr logger.
void ConfigureLogging();

}  // namespace simctl

#endif  // VMSIM_TOOLS_COMMANDS_HPP_
