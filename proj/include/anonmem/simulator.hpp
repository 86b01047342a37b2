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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "anonmem/memory.hpp"
#include "anonmem/protocols.hpp"
#include "anonmem/schedule.hpp"

namespace anonmem {

enum class ProtocolKind : std::uint8_t { Mutex, Consensus, SetAgreement };

std::string_view to_string(ProtocolKind kind);
ProtocolKind parse_protocol(std::string_view text);

/// How a process at a set-agreement write picks its target when the
/// schedule does not pin one.
enum class ChoicePolicy : std::uint8_t { Smallest, Random };

struct RunConfig {
  ProtocolKind protocol = ProtocolKind::Mutex;
  std::size_t n = 2;
  std::size_t m = 3;
  std::vector<std::uint64_t> inputs;  // agreement protocols, one per process

  // mutex variants
  bool abortable = false;
  ExitRule exit_rule = ExitRule::RoundReachesN;
  std::uint32_t acquisitions = 1;

  PermutationTable perms;  // empty means all-identity
  ChoicePolicy choice = ChoicePolicy::Smallest;
  std::uint64_t choice_seed = 0;
  std::size_t step_budget = 10'000'000;

  /// Mutex and consensus need cas; set agreement runs on RW registers.
  RegisterModel model() const;
  bool crashes_allowed() const { return protocol != ProtocolKind::Mutex; }

  /// Fills defaulted fields (identity permutations) and checks the
  /// protocol's domain; ConfigError names the offending field.
  void validate();
};

using LocalState = std::variant<MutexState, ConsensusState, SetAgreementState>;

struct ProcessSlot {
  LocalState local;
  bool crashed = false;

  friend bool operator==(const ProcessSlot&, const ProcessSlot&) = default;
};

enum class ProcessStatus : std::uint8_t {
  Active,     // inside acquire() / propose()
  InCS,
  Releasing,
  Decided,
  Done,
  Aborted,
  Crashed,
};

std::string_view to_string(ProcessStatus status);

struct GlobalState {
  AnonymousMemory memory;
  std::vector<ProcessSlot> procs;

  friend bool operator==(const GlobalState&, const GlobalState&) = default;
};

/// Binds a validated configuration to its protocol and applies directives
/// to global states. Stateless apart from the configuration, so one
/// instance can drive any number of states.
class Simulator {
 public:
  explicit Simulator(RunConfig config);

  const RunConfig& config() const { return config_; }
  std::size_t processes() const { return config_.n; }

  GlobalState initial_state() const;

  ProcessStatus status(const GlobalState& g, std::uint32_t pid) const;
  /// Alive and unfinished: a Step directive is legal.
  bool enabled(const GlobalState& g, std::uint32_t pid) const;
  bool any_enabled(const GlobalState& g) const;
  /// Write targets the process may pick right now (empty if no choice).
  std::vector<std::uint32_t> choice_options(const GlobalState& g, std::uint32_t pid) const;

  /// Executes one directive. Throws ScheduleError if it is illegal here.
  StepOutcome apply(GlobalState& g, const Directive& d,
                    std::vector<MemoryEvent>* log = nullptr) const;

  std::optional<std::uint64_t> decision(const GlobalState& g, std::uint32_t pid) const;
  std::vector<std::uint64_t> decisions(const GlobalState& g) const;
  std::size_t in_critical_section(const GlobalState& g) const;
  /// Mutex: largest round held and how many processes hold it.
  std::pair<std::uint32_t, std::size_t> top_round(const GlobalState& g) const;

  /// Lossless canonical encoding; equal encodings iff equal states.
  std::string encode(const GlobalState& g) const;
  GlobalState decode(std::string_view key) const;

  const MutexProtocol& mutex() const { return *mutex_; }
  const ConsensusProtocol& consensus() const { return *consensus_; }
  const SetAgreementProtocol& set_agreement() const { return *set_agreement_; }

 private:
  RunConfig config_;
  std::optional<MutexProtocol> mutex_;
  std::optional<ConsensusProtocol> consensus_;
  std::optional<SetAgreementProtocol> set_agreement_;
};

struct TraceStep {
  Directive directive;
  StepOutcome outcome;
  std::vector<ProcessStatus> statuses;  // after the directive
};

struct Trace {
  RunConfig config;
  Schedule schedule;  // executed prefix
  std::vector<MemoryEvent> events;
  std::vector<TraceStep> steps;
  GlobalState final_state;
  bool truncated = false;  // step budget hit before the schedule ended

  /// Shared accesses performed by `pid`.
  std::size_t accesses_by(std::uint32_t pid) const;
  /// FNV-1a over the serialized event lines; stable across processes.
  std::uint64_t hash() const;
};

std::uint64_t event_log_hash(const std::vector<MemoryEvent>& events);

/// Executes `schedule` from the initial state. Throws ScheduleError for an
/// illegal directive; stops with `truncated` once the step budget is spent.
Trace run(const Simulator& sim, const Schedule& schedule);
Trace run(const RunConfig& config, const Schedule& schedule);

/// p_1, ..., p_n repeated `rounds` times.
Schedule lockstep_schedule(const RunConfig& config, std::size_t rounds);

/// Seeded uniform choice among enabled processes; each pick crashes the
/// process instead with `crash_probability` (never for mutex). Pins write
/// targets when the config's choice policy is Random. Stops early once no
/// process is enabled.
Schedule random_schedule(const Simulator& sim, std::uint64_t seed, std::size_t length,
                         double crash_probability);

struct SoloResult {
  StepOutcome outcome;     // first non-Running outcome, or Running
  std::size_t steps = 0;
  bool progressed() const { return outcome.kind != Outcome::Running; }
};

/// Steps only `pid` from `state` until it produces a non-Running outcome or
/// `budget` steps are spent.
SoloResult solo_extension(const Simulator& sim, GlobalState state, std::uint32_t pid,
                          std::size_t budget);

}  // namespace anonmem
