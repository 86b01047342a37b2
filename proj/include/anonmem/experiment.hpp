/*
 * Copyright 2026 The anonmem Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anonmem/explorer.hpp"
#include "anonmem/properties.hpp"
#include "anonmem/simulator.hpp"

namespace anonmem {

enum class Mode : std::uint8_t { Admissible, Run, Explore, Check, Hunt, Replay };

std::string_view to_string(Mode mode);

/// Exit codes, the machine-readable contract of the command line tool.
namespace exit_code {
inline constexpr int kHolds = 0;
inline constexpr int kViolation = 1;
inline constexpr int kInconclusive = 2;
inline constexpr int kUsage = 3;
inline constexpr int kIo = 4;
inline constexpr int kInternal = 5;
}  // namespace exit_code

/// Input/output failure, kept apart from verdict outcomes.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
  Mode mode = Mode::Run;
  RunConfig config;
  /// identity | all | seeded:<seed> | index:<k> | explicit table "2,3,1;1,2,3".
  std::string perm_source = "identity";

  // run
  std::optional<Schedule> schedule;
  std::uint64_t seed = 1;
  std::size_t length = 1000;
  double crash_probability = 0.0;
  std::vector<std::pair<std::uint32_t, std::size_t>> crash_plan;  // (pid, before step), 0-based pid

  // explore / check
  ExploreBounds bounds;
  bool dump_edges = false;
  std::vector<std::string> properties;  // empty: every property of the protocol
  std::size_t k = 0;                     // 0: protocol default
  std::size_t budget = 0;                // solo budget, 0: protocol default
  std::size_t bound = 0;                 // wait-freedom bound, 0: 2m
  ProbeOptions probe;
  bool probe_enabled = false;

  // hunt
  HuntOptions hunt;

  // admissible
  std::size_t limit = 10;

  // replay
  std::string artifact_path;

  std::filesystem::path out_root;
  std::string stamp;

  std::size_t agreement_k() const;
  std::size_t solo_budget() const;
  std::size_t wait_bound() const;
  /// Permutation tables named by perm_source ("all" enumerates them).
  std::vector<PermutationTable> tables() const;
};

/// Builds a spec from flat key/value pairs (config-file keys and long flag
/// names are the same). Throws ConfigError naming the offending key.
ExperimentSpec spec_from_values(Mode mode, const std::map<std::string, std::string>& kv,
                                const std::vector<std::string>& crashes,
                                const std::vector<std::string>& properties);

/// Parses `argv`; flags override values from `--config <file>`. Throws
/// ConfigError (and CLI::ParseError for malformed command lines, after
/// printing help or the parse error to `out`/`err`).
ExperimentSpec parse_spec(int argc, const char* const* argv, std::ostream& out,
                          std::ostream& err);
ExperimentSpec parse_spec(int argc, const char* const* argv);

/// Runs the experiment, writing artifacts under out_root/stamp and a
/// human-readable report to `out`. Returns an exit code.
int execute(const ExperimentSpec& spec, std::ostream& out);

/// Re-runs a trace or witness file. The verdict is False when a stored
/// violation reproduces; a changed event-log hash throws std::logic_error.
Verdict replay(const std::filesystem::path& artifact, std::ostream& out);

/// Whole command line: parse, execute, map failures to exit codes.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anonmem
