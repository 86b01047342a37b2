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

#include "anonmem/schedule.hpp"

#include <cctype>
#include <charconv>

#include "anonmem/error.hpp"

namespace anonmem {

std::string Directive::to_string() const {
  std::string out = kind == Kind::Step ? "S" : "C";
  out += std::to_string(pid + 1);
  if (choice) out += ":" + std::to_string(*choice + 1);
  return out;
}

namespace {

std::uint64_t parse_positive(std::string_view text, std::string_view token) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || v == 0) {
    throw ConfigError("schedule: bad token '" + std::string(token) + "'");
  }
  return v;
}

}  // namespace

Schedule parse_schedule(std::string_view text) {
  Schedule out;
  std::size_t p = 0;
  while (p < text.size()) {
    while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p]))) ++p;
    std::size_t q = p;
    while (q < text.size() && !std::isspace(static_cast<unsigned char>(text[q]))) ++q;
    if (q == p) break;
    std::string_view token = text.substr(p, q - p);
    p = q;

    std::uint64_t repeat = 1;
    std::string_view body = token;
    if (auto star = token.find('*'); star != std::string_view::npos) {
      repeat = parse_positive(token.substr(star + 1), token);
      body = token.substr(0, star);
    }
    if (body.size() < 2 || (body[0] != 'S' && body[0] != 'C')) {
      throw ConfigError("schedule: bad token '" + std::string(token) + "'");
    }
    Directive d;
    d.kind = body[0] == 'S' ? Directive::Kind::Step : Directive::Kind::Crash;
    std::string_view rest = body.substr(1);
    if (auto colon = rest.find(':'); colon != std::string_view::npos) {
      if (d.kind == Directive::Kind::Crash) {
        throw ConfigError("schedule: crash takes no choice in '" + std::string(token) + "'");
      }
      d.choice = static_cast<std::uint32_t>(parse_positive(rest.substr(colon + 1), token) - 1);
      rest = rest.substr(0, colon);
    }
    d.pid = static_cast<std::uint32_t>(parse_positive(rest, token) - 1);
    out.insert(out.end(), repeat, d);
  }
  return out;
}

std::string format_schedule(const Schedule& schedule) {
  std::string out;
  for (const auto& d : schedule) {
    if (!out.empty()) out += ' ';
    out += d.to_string();
  }
  return out;
}

}  // namespace anonmem
