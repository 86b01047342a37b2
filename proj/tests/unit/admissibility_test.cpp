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

#include <doctest.h>

#include "anonmem/admissibility.hpp"
#include "anonmem/error.hpp"
#include "../oracles.hpp"

using namespace anonmem;

TEST_CASE("gcd") {
  CHECK(gcd(12, 18) == 6);
  CHECK(gcd(7, 1) == 1);
  CHECK(gcd(2, 3) == 1);
  CHECK(gcd(0, 9) == 9);
  CHECK_THROWS_AS(gcd(0, 0), ConfigError);
}

TEST_CASE("is_admissible on small pairs") {
  CHECK(is_admissible(2, 3));
  CHECK_FALSE(is_admissible(2, 2));
  CHECK_FALSE(is_admissible(3, 6));
  CHECK(is_admissible(4, 7));
  CHECK(is_admissible(9, 1));
  CHECK_THROWS_AS(is_admissible(1, 3), ConfigError);
  CHECK_THROWS_AS(is_admissible(2, 0), ConfigError);
}

TEST_CASE("admissible_sizes tables") {
  CHECK(admissible_sizes(2, 10).members == std::vector<std::uint64_t>{1, 3, 5, 7, 9});
  CHECK(admissible_sizes(3, 10).members == std::vector<std::uint64_t>{1, 5, 7});
  CHECK(admissible_sizes(4, 12).members == std::vector<std::uint64_t>{1, 5, 7, 11});
  CHECK(admissible_sizes(4, 12).n == 4);
  CHECK(admissible_sizes(4, 12).contains(11));
  CHECK_FALSE(admissible_sizes(4, 12).contains(9));
  CHECK_THROWS_AS(admissible_sizes(2, 0), ConfigError);
}

TEST_CASE("admissible_sizes agrees with the divisor scan") {
  for (std::uint64_t n = 2; n <= 12; ++n) {
    CAPTURE(n);
    CHECK(admissible_sizes(n, 400).members == oracle::divisor_table(n, 400));
  }
}

TEST_CASE("sets shrink as n grows") {
  for (std::uint64_t n = 2; n < 15; ++n) {
    auto small = admissible_sizes(n, 300);
    auto big = admissible_sizes(n + 1, 300);
    for (auto m : big.members) CHECK(small.contains(m));
    CHECK(big.contains(1));
  }
}

TEST_CASE("withdrawal thresholds are fractional for admissible m") {
  for (std::uint64_t n = 2; n <= 6; ++n) {
    for (std::uint64_t m = 1; m <= 60; ++m) {
      if (is_admissible(n, m)) CHECK(withdrawal_thresholds_fractional(n, m));
    }
  }
  CHECK_FALSE(withdrawal_thresholds_fractional(2, 2));
}
