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

#include "anonmem/minimize.hpp"

#include <algorithm>
#include <stdexcept>

#include "anonmem/error.hpp"

namespace anonmem {

namespace {

std::optional<Trace> try_run(const Simulator& sim, const Schedule& s,
                             const TracePredicate& violates) {
  try {
    Trace t = run(sim, s);
    if (!t.truncated && violates(t)) return t;
  } catch (const ScheduleError&) {
  }
  return std::nullopt;
}

Schedule without(const Schedule& s, std::size_t begin, std::size_t end) {
  Schedule out(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(begin));
  out.insert(out.end(), s.begin() + static_cast<std::ptrdiff_t>(end), s.end());
  return out;
}

}  // namespace

Trace minimize_trace(const Simulator& sim, const Trace& trace, const TracePredicate& violates) {
  auto current = try_run(sim, trace.schedule, violates);
  if (!current) throw std::invalid_argument("minimize_trace: predicate fails on the input run");

  // ddmin over complements.
  std::size_t granularity = 2;
  while (current->schedule.size() >= 2) {
    const Schedule& s = current->schedule;
    std::size_t chunk = (s.size() + granularity - 1) / granularity;
    bool reduced = false;
    for (std::size_t begin = 0; begin < s.size(); begin += chunk) {
      auto t = try_run(sim, without(s, begin, std::min(s.size(), begin + chunk)), violates);
      if (t) {
        current = std::move(t);
        granularity = std::max<std::size_t>(granularity - 1, 2);
        reduced = true;
        break;
      }
    }
    if (reduced) continue;
    if (chunk == 1) break;
    granularity = std::min(granularity * 2, s.size());
  }

  // Single removals until a fixpoint; ddmin at chunk 1 is close but a late
  // removal can enable an earlier one.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = current->schedule.size(); i-- > 0;) {
      auto t = try_run(sim, without(current->schedule, i, i + 1), violates);
      if (t) {
        current = std::move(t);
        changed = true;
      }
    }
  }
  return std::move(*current);
}

}  // namespace anonmem
