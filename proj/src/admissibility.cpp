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

#include "anonmem/admissibility.hpp"

#include <algorithm>
#include <string>

#include "anonmem/error.hpp"

namespace anonmem {

namespace {

void require_domain(std::uint64_t n, std::uint64_t m) {
  if (n < 2) throw ConfigError("n must be >= 2, got " + std::to_string(n));
  if (m < 1) throw ConfigError("m must be >= 1, got " + std::to_string(m));
}

}  // namespace

bool AdmissibilitySet::contains(std::uint64_t m) const {
  return std::binary_search(members.begin(), members.end(), m);
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  if (a == 0 && b == 0) throw ConfigError("gcd(0, 0) is undefined");
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool is_admissible(std::uint64_t n, std::uint64_t m) {
  require_domain(n, m);
  for (std::uint64_t l = 2; l <= n; ++l) {
    if (gcd(l, m) != 1) return false;
  }
  return true;
}

AdmissibilitySet admissible_sizes(std::uint64_t n, std::uint64_t limit) {
  if (limit < 1) throw ConfigError("limit must be >= 1");
  require_domain(n, 1);
  AdmissibilitySet set;
  set.n = n;
  for (std::uint64_t m = 1; m <= limit; ++m) {
    if (is_admissible(n, m)) set.members.push_back(m);
  }
  return set;
}

bool withdrawal_thresholds_fractional(std::uint64_t n, std::uint64_t m) {
  require_domain(n, m);
  for (std::uint64_t d = 2; d <= n; ++d) {
    if (m % d == 0) return false;
  }
  return true;
}

}  // namespace anonmem
