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
#include <string_view>
#include <vector>

#include "anonmem/codec.hpp"
#include "anonmem/memory.hpp"

namespace anonmem {

enum class Outcome : std::uint8_t { Running, EnteredCS, ExitedCS, Decided, Aborted, Done };

std::string_view to_string(Outcome outcome);

/// Result of one step. `value` is the decision for Outcome::Decided.
struct StepOutcome {
  Outcome kind = Outcome::Running;
  std::uint64_t value = 0;

  static StepOutcome running() { return {}; }
  static StepOutcome decided(std::uint64_t v) { return {Outcome::Decided, v}; }

  /// Decided, Aborted and Done never change once reached.
  bool terminal() const {
    return kind == Outcome::Decided || kind == Outcome::Aborted || kind == Outcome::Done;
  }
  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

// ---------------------------------------------------------------------------
// Mutual exclusion over anonymous RMW registers (the narrowing-ladder lock).

/// When a climbing process may enter the critical section.
enum class ExitRule : std::uint8_t {
  RoundReachesN,    // until round = n
  OwnsAllRegisters  // until counter = m
};

struct MutexOptions {
  std::size_t n = 2;
  std::size_t m = 3;
  bool abortable = false;
  ExitRule exit_rule = ExitRule::RoundReachesN;
  /// acquire()/release() invocations per process; 1 keeps the graph finite.
  std::uint32_t acquisitions = 1;
};

struct MutexState {
  /// One location per shared-access site of acquire()/release(), plus the
  /// in-CS and terminal phases.
  enum class Pc : std::uint8_t {
    ScanMax,        // one read per register, ascending local index
    ClaimFirst,     // cas(R[j], B, 1)
    Confirm,        // R[j] <- round for owned j
    Probe,          // re-read while R[j] < round
    Claim,          // cas(R[j], B, round)
    Withdraw,       // R[j] <- B for owned j
    AwaitEmpty,     // wait until every R[j] = B, rescanning on non-B
    InCriticalSection,
    Release,        // R[j] <- B for all j
    Aborted,
    Done,
  };

  Pc pc = Pc::ScanMax;
  std::uint32_t cursor = 0;       // loop index j (0-based)
  std::uint32_t round = 0;
  std::uint32_t counter = 0;
  std::uint64_t maximum = 0;      // floor is 0; B never raises it
  std::vector<bool> myview;
  std::uint32_t acquisitions_left = 1;

  std::uint32_t owned() const;
  friend bool operator==(const MutexState&, const MutexState&) = default;
};

class MutexProtocol {
 public:
  explicit MutexProtocol(MutexOptions options);

  const MutexOptions& options() const { return options_; }

  /// Fresh acquire(): identical for every process.
  MutexState init() const;

  /// Exactly one shared access, then local computation up to the next
  /// access site. Throws ScheduleError on a terminal state.
  StepOutcome step(MutexState& s, RmwPort& mem) const;

  static bool terminal(const MutexState& s) {
    return s.pc == MutexState::Pc::Aborted || s.pc == MutexState::Pc::Done;
  }
  static bool in_critical_section(const MutexState& s) {
    return s.pc == MutexState::Pc::InCriticalSection;
  }
  /// Inside acquire() (not in CS, not releasing, not finished).
  static bool pending_acquire(const MutexState& s);

  void encode(const MutexState& s, detail::ByteWriter& w) const;
  MutexState decode(detail::ByteReader& r) const;

 private:
  StepOutcome after_scan(MutexState& s) const;
  StepOutcome after_claims(MutexState& s) const;
  StepOutcome after_withdraw_writes(MutexState& s) const;
  StepOutcome loop_test(MutexState& s) const;
  StepOutcome finish_release(MutexState& s) const;
  std::uint32_t next_owned(const MutexState& s, std::uint32_t from) const;

  MutexOptions options_;
};

// ---------------------------------------------------------------------------
// Wait-free consensus over anonymous RMW registers.

struct ConsensusState {
  enum class Pc : std::uint8_t { Propose, Collect, Decided };

  Pc pc = Pc::Propose;
  std::uint32_t cursor = 0;
  std::uint64_t input = 0;
  Value maximum;
  std::optional<std::uint64_t> decided;

  friend bool operator==(const ConsensusState&, const ConsensusState&) = default;
};

class ConsensusProtocol {
 public:
  explicit ConsensusProtocol(std::size_t m);

  /// Bottom cannot be proposed; throws ConfigError for out-of-range inputs.
  ConsensusState init(std::uint64_t input) const;

  /// m cas steps, then m reads; the last read returns Decided(max).
  StepOutcome step(ConsensusState& s, RmwPort& mem) const;

  static bool terminal(const ConsensusState& s) { return s.pc == ConsensusState::Pc::Decided; }

  void encode(const ConsensusState& s, detail::ByteWriter& w) const;
  ConsensusState decode(detail::ByteReader& r) const;

 private:
  std::size_t m_;
};

// ---------------------------------------------------------------------------
// Obstruction-free set agreement over anonymous RW registers.

struct SetAgreementState {
  enum class Pc : std::uint8_t {
    Collect,  // first collect
    Write,    // target picked by the caller's choice
    Verify,   // second collect
    Decided,
  };

  Pc pc = Pc::Collect;
  std::uint32_t cursor = 0;
  std::uint64_t preference = 0;
  std::vector<Value> view;
  std::optional<std::uint64_t> decided;

  friend bool operator==(const SetAgreementState&, const SetAgreementState&) = default;
};

class SetAgreementProtocol {
 public:
  explicit SetAgreementProtocol(std::size_t m);

  SetAgreementState init(std::uint64_t input) const;

  /// Local indices k with view[k] != preference; non-empty exactly when the
  /// state is at a write. These are the options an adversary may pick from.
  std::vector<std::uint32_t> write_candidates(const SetAgreementState& s) const;

  /// One read or write. `choice` selects the write target (must be one of
  /// write_candidates); without it the smallest candidate is used. Passing
  /// a choice anywhere else throws ScheduleError.
  StepOutcome step(SetAgreementState& s, ReadWritePort& mem,
                   std::optional<std::uint32_t> choice = std::nullopt) const;

  static bool terminal(const SetAgreementState& s) {
    return s.pc == SetAgreementState::Pc::Decided;
  }

  void encode(const SetAgreementState& s, detail::ByteWriter& w) const;
  SetAgreementState decode(detail::ByteReader& r) const;

 private:
  void settle_after_collect(SetAgreementState& s) const;

  std::size_t m_;
};

}  // namespace anonmem
