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

#include <functional>

#include "anonmem/simulator.hpp"

namespace anonmem {

/// Predicate over a completed run. Schedules that are illegal after a
/// removal never reach it; they count as not violating.
using TracePredicate = std::function<bool(const Trace&)>;

/// Delta-debugging shrink followed by a single-removal pass, so no single
/// directive of the result can be dropped without losing the predicate.
/// Throws std::invalid_argument if the predicate fails on `trace`.
Trace minimize_trace(const Simulator& sim, const Trace& trace, const TracePredicate& violates);

}  // namespace anonmem
