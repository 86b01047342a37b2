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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace anonmem {

/// Step(pid) or Crash(pid); a Step may pin the write target of a process
/// that is about to choose one (set agreement).
struct Directive {
  enum class Kind : std::uint8_t { Step, Crash };

  Kind kind = Kind::Step;
  std::uint32_t pid = 0;                 // 0-based
  std::optional<std::uint32_t> choice;   // 0-based local register

  static Directive step(std::uint32_t pid, std::optional<std::uint32_t> choice = std::nullopt) {
    return {Kind::Step, pid, choice};
  }
  static Directive crash(std::uint32_t pid) { return {Kind::Crash, pid, std::nullopt}; }

  /// "S1", "S2:3", "C1" (1-based).
  std::string to_string() const;

  friend bool operator==(const Directive&, const Directive&) = default;
};

using Schedule = std::vector<Directive>;

/// Whitespace-separated tokens `S<pid>`, `S<pid>:<k>`, `C<pid>`, each with
/// an optional `*count` repetition suffix.
Schedule parse_schedule(std::string_view text);

/// Canonical form, one token per directive, no repetition suffixes.
std::string format_schedule(const Schedule& schedule);

}  // namespace anonmem
