/*
 * Copyright 2026 The yoruba-adr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line front end: prepare, stats, train-lm, baseline, train,
// restore, eval, attention and synth.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>

namespace adr::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitDivergence = 3,
};

// `args` excludes the program name. Data goes to `out` (or files),
// diagnostics to `err`.
int dispatch(std::span<const std::string> args, std::istream& in, std::ostream& out,
             std::ostream& err);
int dispatch(int argc, const char* const* argv);

// key = value lines; lines starting with '#' or ';' are comments. Keys are
// returned with underscores turned into dashes. Throws ConfigError on
// malformed lines.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// ADR_SEED when set, otherwise 1. Throws ConfigError if ADR_SEED is not an
// unsigned integer.
std::uint64_t default_seed();

}  // namespace adr::cli
