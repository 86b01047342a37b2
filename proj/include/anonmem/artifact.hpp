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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anonmem/properties.hpp"
#include "anonmem/simulator.hpp"

namespace anonmem {

/// Self-describing artifact: `key=value` header lines (full run
/// configuration, schedule, and optional verdict fields), then an optional
/// `---` line followed by memory-event lines.
struct Artifact {
  RunConfig config;
  Schedule schedule;
  std::string property;  // empty for plain traces
  std::optional<Holds> holds;
  std::size_t k = 1;
  std::optional<std::uint64_t> trace_hash;
  std::optional<std::size_t> cycle_start;
  std::optional<std::size_t> stuck_at;
  bool lockstep = false;
  std::vector<MemoryEvent> events;

  static Artifact from_trace(const Trace& trace);
  static Artifact from_verdict(const Verdict& verdict, std::size_t k = 1);
  Witness witness() const;

  std::string serialize() const;
  /// Throws ConfigError naming the key for malformed or missing fields.
  static Artifact parse(std::string_view text);
};

std::string_view to_string(ExitRule rule);
ExitRule parse_exit_rule(std::string_view text);
Holds parse_holds(std::string_view text);
std::string format_inputs(const std::vector<std::uint64_t>& inputs);
/// Comma-separated payloads; rejects "B" and anything out of range.
std::vector<std::uint64_t> parse_inputs(std::string_view text);
bool parse_bool(std::string_view key, std::string_view text);

/// Flat `key=value` text, one key per line; `#` starts a comment line.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Writes the configuration keys of `config` into `kv` and back.
void put_config(std::map<std::string, std::string>& kv, const RunConfig& config);
RunConfig get_config(const std::map<std::string, std::string>& kv);

}  // namespace anonmem
