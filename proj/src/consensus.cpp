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

#include "anonmem/error.hpp"
#include "anonmem/protocols.hpp"

namespace anonmem {

using Pc = ConsensusState::Pc;

ConsensusProtocol::ConsensusProtocol(std::size_t m) : m_(m) {
  if (m_ < 1) throw ConfigError("m must be >= 1");
}

ConsensusState ConsensusProtocol::init(std::uint64_t input) const {
  if (input > Value::kMaxPayload) throw ConfigError("input is not a valid proposal");
  ConsensusState s;
  s.input = input;
  return s;
}

StepOutcome ConsensusProtocol::step(ConsensusState& s, RmwPort& mem) const {
  switch (s.pc) {
    case Pc::Propose:
      mem.cas(s.cursor, Value::bottom(), Value::of(s.input));
      if (++s.cursor == m_) {
        s.pc = Pc::Collect;
        s.cursor = 0;
      }
      return StepOutcome::running();
    case Pc::Collect: {
      s.maximum = std::max(s.maximum, mem.read(s.cursor));
      if (++s.cursor < m_) return StepOutcome::running();
      // Every register was proposed into before the collect, so none is B.
      s.decided = s.maximum.payload();
      s.pc = Pc::Decided;
      return StepOutcome::decided(*s.decided);
    }
    case Pc::Decided:
      break;
  }
  throw ScheduleError("consensus process already decided");
}

void ConsensusProtocol::encode(const ConsensusState& s, detail::ByteWriter& w) const {
  w.put(static_cast<std::uint64_t>(s.pc));
  w.put(s.cursor);
  w.put(s.input);
  w.put(s.maximum.raw());
  w.put(s.decided ? *s.decided + 1 : 0);
}

ConsensusState ConsensusProtocol::decode(detail::ByteReader& r) const {
  ConsensusState s;
  s.pc = static_cast<Pc>(r.get());
  s.cursor = static_cast<std::uint32_t>(r.get());
  s.input = r.get();
  s.maximum = Value::from_raw(r.get());
  if (auto d = r.get()) s.decided = d - 1;
  return s;
}

}  // namespace anonmem
