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

#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace anonmem {

/// Content of one anonymous register: either bottom or a non-negative
/// payload. Bottom orders strictly below every payload, which lets the
/// protocols compare raw values (`R[j] < round`) without special cases.
///
/// Stored as `payload + 1` with 0 reserved for bottom, so the defaulted
/// comparison is the required total order.
class Value {
 public:
  static constexpr std::uint64_t kMaxPayload =
      std::numeric_limits<std::uint64_t>::max() - 1;

  constexpr Value() = default;

  static constexpr Value bottom() { return Value{}; }
  static Value of(std::uint64_t payload);
  static constexpr Value from_raw(std::uint64_t raw) {
    Value v;
    v.raw_ = raw;
    return v;
  }

  constexpr bool is_bottom() const { return raw_ == 0; }
  std::uint64_t payload() const;
  constexpr std::uint64_t raw() const { return raw_; }

  /// "B" for bottom, decimal payload otherwise.
  std::string to_string() const;
  static Value parse(std::string_view text);

  friend constexpr auto operator<=>(const Value&, const Value&) = default;

 private:
  std::uint64_t raw_ = 0;
};

}  // namespace anonmem
