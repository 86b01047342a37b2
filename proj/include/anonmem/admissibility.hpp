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
#include <vector>

namespace anonmem {

/// Memory sizes m (within a queried range) for which n anonymous
/// processes can run deadlock-free mutex over RMW registers.
struct AdmissibilitySet {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> members;  // ascending

  bool contains(std::uint64_t m) const;
};

/// Euclid. Throws ConfigError on gcd(0, 0).
std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

/// True iff gcd(l, m) == 1 for every l in (1, n].
bool is_admissible(std::uint64_t n, std::uint64_t m);

AdmissibilitySet admissible_sizes(std::uint64_t n, std::uint64_t limit);

/// Whether m / d is a non-integer for every divisor d in {2, ..., n}. These
/// are the competitor counts n - round + 1 seen by the withdrawal test for
/// rounds 1..n-1. Holds for every admissible m.
bool withdrawal_thresholds_fractional(std::uint64_t n, std::uint64_t m);

}  // namespace anonmem
