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

#include <algorithm>
#include <string>

#include "anonmem/error.hpp"
#include "anonmem/protocols.hpp"

namespace anonmem {

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Running: return "running";
    case Outcome::EnteredCS: return "entered-cs";
    case Outcome::ExitedCS: return "exited-cs";
    case Outcome::Decided: return "decided";
    case Outcome::Aborted: return "aborted";
    case Outcome::Done: return "done";
  }
  return "?";
}

std::uint32_t MutexState::owned() const {
  return static_cast<std::uint32_t>(std::count(myview.begin(), myview.end(), true));
}

using Pc = MutexState::Pc;

MutexProtocol::MutexProtocol(MutexOptions options) : options_(options) {
  if (options_.n < 2) throw ConfigError("n must be >= 2");
  if (options_.m < 1) throw ConfigError("m must be >= 1");
  if (options_.acquisitions < 1) throw ConfigError("acquisitions must be >= 1");
}

MutexState MutexProtocol::init() const {
  MutexState s;
  s.myview.assign(options_.m, false);
  s.acquisitions_left = options_.acquisitions;
  return s;
}

bool MutexProtocol::pending_acquire(const MutexState& s) {
  switch (s.pc) {
    case Pc::InCriticalSection:
    case Pc::Release:
    case Pc::Aborted:
    case Pc::Done:
      return false;
    default:
      return true;
  }
}

std::uint32_t MutexProtocol::next_owned(const MutexState& s, std::uint32_t from) const {
  auto m = static_cast<std::uint32_t>(options_.m);
  while (from < m && !s.myview[from]) ++from;
  return from;
}

StepOutcome MutexProtocol::step(MutexState& s, RmwPort& mem) const {
  const auto m = static_cast<std::uint32_t>(options_.m);
  switch (s.pc) {
    case Pc::ScanMax: {
      Value v = mem.read(s.cursor);
      if (!v.is_bottom()) s.maximum = std::max(s.maximum, v.payload());
      if (++s.cursor < m) return StepOutcome::running();
      return after_scan(s);
    }
    case Pc::ClaimFirst: {
      bool ok = mem.cas(s.cursor, Value::bottom(), Value::of(1));
      s.myview[s.cursor] = ok;
      if (ok) ++s.counter;
      if (++s.cursor < m) return StepOutcome::running();
      return after_claims(s);
    }
    case Pc::Confirm: {
      mem.write(s.cursor, Value::of(s.round));
      s.cursor = next_owned(s, s.cursor + 1);
      if (s.cursor == m) {
        s.pc = Pc::Probe;
        s.cursor = 0;
      }
      return StepOutcome::running();
    }
    case Pc::Probe: {
      if (mem.read(s.cursor) < Value::of(s.round)) {
        s.pc = Pc::Claim;
        return StepOutcome::running();
      }
      if (++s.cursor < m) return StepOutcome::running();
      return after_claims(s);
    }
    case Pc::Claim: {
      bool ok = mem.cas(s.cursor, Value::bottom(), Value::of(s.round));
      s.myview[s.cursor] = ok;
      if (ok) ++s.counter;
      s.pc = Pc::Probe;  // the while condition is re-read as its own step
      return StepOutcome::running();
    }
    case Pc::Withdraw: {
      mem.write(s.cursor, Value::bottom());
      s.myview[s.cursor] = false;
      s.cursor = next_owned(s, s.cursor + 1);
      if (s.cursor < m) return StepOutcome::running();
      return after_withdraw_writes(s);
    }
    case Pc::AwaitEmpty: {
      if (!mem.read(s.cursor).is_bottom()) {
        s.cursor = 0;
        return StepOutcome::running();
      }
      if (++s.cursor < m) return StepOutcome::running();
      s.counter = 0;
      s.round = 0;
      return loop_test(s);
    }
    case Pc::InCriticalSection: {
      mem.write(0, Value::bottom());
      s.myview[0] = false;
      if (m == 1) return finish_release(s);
      s.pc = Pc::Release;
      s.cursor = 1;
      return {Outcome::ExitedCS, 0};
    }
    case Pc::Release: {
      mem.write(s.cursor, Value::bottom());
      s.myview[s.cursor] = false;
      if (++s.cursor < m) return StepOutcome::running();
      return finish_release(s);
    }
    case Pc::Aborted:
    case Pc::Done:
      break;
  }
  throw ScheduleError("mutex process already finished");
}

// Decide the round from the scanned maximum, then move to the next access site.
StepOutcome MutexProtocol::after_scan(MutexState& s) const {
  if (s.round < s.maximum) {
    if (options_.abortable) {
      s.pc = Pc::Aborted;
      return {Outcome::Aborted, 0};
    }
    // Withdraw without releasing owned registers.
    s.round = 0;
  } else {
    ++s.round;
  }

  if (s.round == 1) {
    s.pc = Pc::ClaimFirst;
    s.cursor = 0;
    return StepOutcome::running();
  }
  if (s.round >= 2) {
    s.cursor = next_owned(s, 0);
    if (s.cursor < options_.m) {
      s.pc = Pc::Confirm;
    } else {
      s.pc = Pc::Probe;
      s.cursor = 0;
    }
    return StepOutcome::running();
  }
  return loop_test(s);
}

// Withdraw when counter < m / (n - round + 1).
StepOutcome MutexProtocol::after_claims(MutexState& s) const {
  if (s.round >= 1) {
    std::uint64_t competitors = options_.n - s.round + 1;
    if (std::uint64_t{s.counter} * competitors < options_.m) {
      s.cursor = next_owned(s, 0);
      if (s.cursor < options_.m) {
        s.pc = Pc::Withdraw;
        return StepOutcome::running();
      }
      return after_withdraw_writes(s);
    }
  }
  return loop_test(s);
}

// Wait for an empty memory and start over, or abort in the abortable variant.
StepOutcome MutexProtocol::after_withdraw_writes(MutexState& s) const {
  if (options_.abortable) {
    s.pc = Pc::Aborted;
    return {Outcome::Aborted, 0};
  }
  s.pc = Pc::AwaitEmpty;
  s.cursor = 0;
  return StepOutcome::running();
}

// Loop exit test.
StepOutcome MutexProtocol::loop_test(MutexState& s) const {
  bool exit = options_.exit_rule == ExitRule::RoundReachesN ? s.round == options_.n
                                                            : s.counter == options_.m;
  if (exit) {
    s.pc = Pc::InCriticalSection;
    s.cursor = 0;
    return {Outcome::EnteredCS, 0};
  }
  s.pc = Pc::ScanMax;
  s.cursor = 0;
  s.maximum = 0;
  return StepOutcome::running();
}

StepOutcome MutexProtocol::finish_release(MutexState& s) const {
  if (--s.acquisitions_left == 0) {
    s.pc = Pc::Done;
    s.cursor = 0;
    return {Outcome::Done, 0};
  }
  // Next acquire() starts from scratch.
  s.counter = 0;
  s.round = 0;
  s.pc = Pc::ScanMax;
  s.cursor = 0;
  s.maximum = 0;
  return {Outcome::ExitedCS, 0};
}

void MutexProtocol::encode(const MutexState& s, detail::ByteWriter& w) const {
  w.put(static_cast<std::uint64_t>(s.pc));
  w.put(s.cursor);
  w.put(s.round);
  w.put(s.counter);
  w.put(s.maximum);
  w.put(s.acquisitions_left);
  std::uint64_t bits = 0;
  int used = 0;
  for (bool b : s.myview) {
    bits |= std::uint64_t{b} << used;
    if (++used == 63) {
      w.put(bits);
      bits = 0;
      used = 0;
    }
  }
  if (used) w.put(bits);
}

MutexState MutexProtocol::decode(detail::ByteReader& r) const {
  MutexState s;
  s.pc = static_cast<Pc>(r.get());
  s.cursor = static_cast<std::uint32_t>(r.get());
  s.round = static_cast<std::uint32_t>(r.get());
  s.counter = static_cast<std::uint32_t>(r.get());
  s.maximum = r.get();
  s.acquisitions_left = static_cast<std::uint32_t>(r.get());
  s.myview.assign(options_.m, false);
  for (std::size_t base = 0; base < options_.m; base += 63) {
    std::uint64_t bits = r.get();
    for (std::size_t k = 0; k < 63 && base + k < options_.m; ++k) {
      s.myview[base + k] = (bits >> k) & 1;
    }
  }
  return s;
}

}  // namespace anonmem
