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

using Pc = SetAgreementState::Pc;

SetAgreementProtocol::SetAgreementProtocol(std::size_t m) : m_(m) {
  if (m_ < 1) throw ConfigError("m must be >= 1");
}

SetAgreementState SetAgreementProtocol::init(std::uint64_t input) const {
  if (input > Value::kMaxPayload) throw ConfigError("input is not a valid proposal");
  SetAgreementState s;
  s.preference = input;
  s.view.assign(m_, Value::bottom());
  return s;
}

std::vector<std::uint32_t> SetAgreementProtocol::write_candidates(
    const SetAgreementState& s) const {
  std::vector<std::uint32_t> out;
  if (s.pc != Pc::Write) return out;
  const Value pref = Value::of(s.preference);
  for (std::uint32_t k = 0; k < m_; ++k) {
    if (s.view[k] != pref) out.push_back(k);
  }
  return out;
}

// Majority adoption and write-target search after a full collect.
void SetAgreementProtocol::settle_after_collect(SetAgreementState& s) const {
  for (std::size_t k = 0; k < m_; ++k) {
    const Value v = s.view[k];
    if (v.is_bottom()) continue;
    auto count = static_cast<std::size_t>(std::count(s.view.begin(), s.view.end(), v));
    if (2 * count > m_) {
      s.preference = v.payload();
      break;
    }
  }
  const Value pref = Value::of(s.preference);
  bool everywhere = std::all_of(s.view.begin(), s.view.end(), [&](Value v) { return v == pref; });
  s.cursor = 0;
  s.pc = everywhere ? Pc::Verify : Pc::Write;
}

StepOutcome SetAgreementProtocol::step(SetAgreementState& s, ReadWritePort& mem,
                                       std::optional<std::uint32_t> choice) const {
  if (choice && s.pc != Pc::Write) {
    throw ScheduleError("write choice given to a process that is not about to write");
  }
  switch (s.pc) {
    case Pc::Collect:
      s.view[s.cursor] = mem.read(s.cursor);
      if (++s.cursor == m_) settle_after_collect(s);
      return StepOutcome::running();
    case Pc::Write: {
      auto candidates = write_candidates(s);
      std::uint32_t target = candidates.front();
      if (choice) {
        if (std::find(candidates.begin(), candidates.end(), *choice) == candidates.end()) {
          throw ScheduleError("write choice " + std::to_string(*choice + 1) +
                              " is not a register differing from the preference");
        }
        target = *choice;
      }
      mem.write(target, Value::of(s.preference));
      // The line-9 test fails: the view still holds a non-preference entry.
      s.pc = Pc::Collect;
      s.cursor = 0;
      return StepOutcome::running();
    }
    case Pc::Verify: {
      s.view[s.cursor] = mem.read(s.cursor);
      if (++s.cursor < m_) return StepOutcome::running();
      const Value pref = Value::of(s.preference);
      if (std::all_of(s.view.begin(), s.view.end(), [&](Value v) { return v == pref; })) {
        s.decided = s.preference;
        s.pc = Pc::Decided;
        return StepOutcome::decided(s.preference);
      }
      s.pc = Pc::Collect;
      s.cursor = 0;
      return StepOutcome::running();
    }
    case Pc::Decided:
      break;
  }
  throw ScheduleError("set-agreement process already decided");
}

void SetAgreementProtocol::encode(const SetAgreementState& s, detail::ByteWriter& w) const {
  w.put(static_cast<std::uint64_t>(s.pc));
  w.put(s.cursor);
  w.put(s.preference);
  for (Value v : s.view) w.put(v.raw());
  w.put(s.decided ? *s.decided + 1 : 0);
}

SetAgreementState SetAgreementProtocol::decode(detail::ByteReader& r) const {
  SetAgreementState s;
  s.pc = static_cast<Pc>(r.get());
  s.cursor = static_cast<std::uint32_t>(r.get());
  s.preference = r.get();
  s.view.resize(m_);
  for (auto& v : s.view) v = Value::from_raw(r.get());
  if (auto d = r.get()) s.decided = d - 1;
  return s;
}

}  // namespace anonmem
