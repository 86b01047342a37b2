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

#include "anonmem/memory.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <random>
#include <sstream>

#include "anonmem/error.hpp"

namespace anonmem {

// -- Value -------------------------------------------------------------------

Value Value::of(std::uint64_t payload) {
  if (payload > kMaxPayload) throw ConfigError("register payload out of range");
  return from_raw(payload + 1);
}

std::uint64_t Value::payload() const {
  if (is_bottom()) throw std::logic_error("payload() of bottom");
  return raw_ - 1;
}

std::string Value::to_string() const {
  return is_bottom() ? std::string("B") : std::to_string(raw_ - 1);
}

Value Value::parse(std::string_view text) {
  if (text == "B") return bottom();
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("bad register value '" + std::string(text) + "'");
  }
  return of(v);
}

// -- Permutations ------------------------------------------------------------

std::string_view to_string(RegisterModel model) {
  return model == RegisterModel::ReadWrite ? "rw" : "rmw";
}

Permutation::Permutation(std::vector<std::uint32_t> zero_based) : map_(std::move(zero_based)) {
  std::vector<bool> seen(map_.size(), false);
  for (auto g : map_) {
    if (g >= map_.size() || seen[g]) throw ConfigError("permutation is not a bijection");
    seen[g] = true;
  }
}

Permutation Permutation::identity(std::size_t m) {
  std::vector<std::uint32_t> v(m);
  std::iota(v.begin(), v.end(), 0u);
  return Permutation(std::move(v));
}

Permutation Permutation::from_one_based(const std::vector<std::uint32_t>& image) {
  std::vector<std::uint32_t> v;
  v.reserve(image.size());
  for (auto x : image) {
    if (x == 0) throw ConfigError("permutation entries are 1-based");
    v.push_back(x - 1);
  }
  return Permutation(std::move(v));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] != i) return false;
  }
  return true;
}

PermutationTable::PermutationTable(std::vector<Permutation> perms) : perms_(std::move(perms)) {
  if (perms_.empty()) throw ConfigError("permutation table needs at least one process");
  for (const auto& p : perms_) {
    if (p.size() != perms_.front().size() || p.size() == 0) {
      throw ConfigError("permutations must all have the same non-zero size");
    }
  }
}

PermutationTable PermutationTable::identity(std::size_t n, std::size_t m) {
  return PermutationTable(std::vector<Permutation>(n, Permutation::identity(m)));
}

PermutationTable PermutationTable::seeded(std::size_t n, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Permutation> perms;
  perms.push_back(Permutation::identity(m));
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<std::uint32_t> v(m);
    std::iota(v.begin(), v.end(), 0u);
    std::shuffle(v.begin(), v.end(), rng);
    perms.emplace_back(std::move(v));
  }
  return PermutationTable(std::move(perms));
}

std::uint64_t PermutationTable::enumeration_size(std::size_t n, std::size_t m) {
  std::uint64_t fact = 1;
  for (std::size_t k = 2; k <= m; ++k) {
    if (fact > std::numeric_limits<std::uint64_t>::max() / k) {
      throw ConfigError("permutation space too large to enumerate");
    }
    fact *= k;
  }
  std::uint64_t total = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / fact) {
      throw ConfigError("permutation space too large to enumerate");
    }
    total *= fact;
  }
  return total;
}

namespace {

// Lexicographic unranking; rank 0 is the identity.
Permutation unrank(std::size_t m, std::uint64_t rank) {
  std::vector<std::uint32_t> pool(m);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<std::uint64_t> fact(m + 1, 1);
  for (std::size_t k = 1; k <= m; ++k) fact[k] = fact[k - 1] * k;
  std::vector<std::uint32_t> out;
  out.reserve(m);
  for (std::size_t pos = m; pos > 0; --pos) {
    std::uint64_t block = fact[pos - 1];
    std::size_t pick = static_cast<std::size_t>(rank / block);
    rank %= block;
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return Permutation(std::move(out));
}

}  // namespace

PermutationTable PermutationTable::enumerate(std::size_t n, std::size_t m, std::uint64_t index) {
  std::uint64_t total = enumeration_size(n, m);
  if (index >= total) {
    throw ConfigError("permutation index " + std::to_string(index) + " out of range (" +
                      std::to_string(total) + " tables)");
  }
  std::uint64_t fact = enumeration_size(2, m);
  std::vector<Permutation> perms(n);
  perms[0] = Permutation::identity(m);
  // Process n-1 is the least significant digit.
  for (std::size_t i = n; i-- > 1;) {
    perms[i] = unrank(m, index % fact);
    index /= fact;
  }
  return PermutationTable(std::move(perms));
}

PermutationTable PermutationTable::rotations(std::size_t n, std::size_t m, std::size_t shift) {
  std::vector<Permutation> perms;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint32_t> v(m);
    for (std::size_t x = 0; x < m; ++x) v[x] = static_cast<std::uint32_t>((x + i * shift) % m);
    perms.emplace_back(std::move(v));
  }
  return PermutationTable(std::move(perms));
}

PermutationTable PermutationTable::parse(std::string_view text) {
  std::vector<Permutation> perms;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view group = text.substr(start, end - start);
    std::vector<std::uint32_t> image;
    std::size_t p = 0;
    while (p <= group.size()) {
      std::size_t q = group.find(',', p);
      if (q == std::string_view::npos) q = group.size();
      std::string_view tok = group.substr(p, q - p);
      std::uint32_t v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ConfigError("perms: bad entry '" + std::string(tok) + "'");
      }
      image.push_back(v);
      p = q + 1;
    }
    perms.push_back(Permutation::from_one_based(image));
    start = end + 1;
  }
  return PermutationTable(std::move(perms));
}

std::string PermutationTable::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < perms_.size(); ++i) {
    if (i) os << ';';
    const auto& img = perms_[i].image();
    for (std::size_t x = 0; x < img.size(); ++x) {
      if (x) os << ',';
      os << img[x] + 1;
    }
  }
  return os.str();
}

// -- Memory ------------------------------------------------------------------

AnonymousMemory::AnonymousMemory(std::size_t m, RegisterModel model)
    : cells_(m, Value::bottom()), model_(model) {
  if (m < 1) throw ConfigError("m must be >= 1");
}

std::string_view to_string(AccessKind kind) {
  switch (kind) {
    case AccessKind::Read: return "read";
    case AccessKind::Write: return "write";
    case AccessKind::Cas: return "cas";
  }
  return "?";
}

std::string MemoryEvent::to_line() const {
  std::ostringstream os;
  os << "step=" << step << " pid=" << pid + 1 << " op=" << to_string(op) << " local=" << local + 1
     << " global=" << global + 1 << " old=" << before.to_string() << " new=" << after.to_string()
     << " ok=" << (ok ? 1 : 0);
  return os.str();
}

MemoryEvent MemoryEvent::parse_line(std::string_view line) {
  MemoryEvent e;
  int seen = 0;
  std::size_t p = 0;
  auto number = [](std::string_view v) {
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
      throw ConfigError("trace: bad number '" + std::string(v) + "'");
    }
    return x;
  };
  while (p < line.size()) {
    std::size_t q = line.find(' ', p);
    if (q == std::string_view::npos) q = line.size();
    std::string_view field = line.substr(p, q - p);
    p = q + 1;
    if (field.empty()) continue;
    auto eq = field.find('=');
    if (eq == std::string_view::npos) throw ConfigError("trace: bad field '" + std::string(field) + "'");
    std::string_view key = field.substr(0, eq), val = field.substr(eq + 1);
    if (key == "step") {
      e.step = number(val);
    } else if (key == "pid") {
      e.pid = static_cast<std::uint32_t>(number(val) - 1);
    } else if (key == "op") {
      if (val == "read") e.op = AccessKind::Read;
      else if (val == "write") e.op = AccessKind::Write;
      else if (val == "cas") e.op = AccessKind::Cas;
      else throw ConfigError("trace: bad op '" + std::string(val) + "'");
    } else if (key == "local") {
      e.local = static_cast<std::uint32_t>(number(val) - 1);
    } else if (key == "global") {
      e.global = static_cast<std::uint32_t>(number(val) - 1);
    } else if (key == "old") {
      e.before = Value::parse(val);
    } else if (key == "new") {
      e.after = Value::parse(val);
    } else if (key == "ok") {
      e.ok = number(val) != 0;
    } else {
      throw ConfigError("trace: unknown field '" + std::string(key) + "'");
    }
    ++seen;
  }
  if (seen != 8) throw ConfigError("trace: expected 8 fields in '" + std::string(line) + "'");
  return e;
}

ReadWritePort::ReadWritePort(AnonymousMemory& memory, const Permutation& perm, std::uint32_t pid,
                             std::vector<MemoryEvent>* log)
    : memory_(&memory), perm_(&perm), pid_(pid), log_(log) {
  if (perm.size() != memory.size()) throw ConfigError("permutation size does not match memory");
}

std::size_t ReadWritePort::resolve(std::size_t local) const {
  if (local >= perm_->size()) {
    throw ConfigError("local register index " + std::to_string(local + 1) + " out of range");
  }
  return (*perm_)(local);
}

void ReadWritePort::record(AccessKind op, std::size_t local, std::size_t global, Value before,
                           Value after, bool ok) {
  ++accesses_;
  if (!log_) return;
  MemoryEvent e;
  e.step = log_->size() + 1;
  e.pid = pid_;
  e.op = op;
  e.local = static_cast<std::uint32_t>(local);
  e.global = static_cast<std::uint32_t>(global);
  e.before = before;
  e.after = after;
  e.ok = ok;
  log_->push_back(e);
}

Value ReadWritePort::read(std::size_t local) {
  std::size_t g = resolve(local);
  Value v = memory_->load(g);
  record(AccessKind::Read, local, g, v, v, true);
  return v;
}

void ReadWritePort::write(std::size_t local, Value v) {
  std::size_t g = resolve(local);
  Value before = memory_->load(g);
  memory_->store(g, v);
  record(AccessKind::Write, local, g, before, v, true);
}

RmwPort::RmwPort(AnonymousMemory& memory, const Permutation& perm, std::uint32_t pid,
                 std::vector<MemoryEvent>* log)
    : ReadWritePort(memory, perm, pid, log) {
  if (memory.model() != RegisterModel::ReadModifyWrite) {
    throw ConfigError("compare-and-swap requested on a read/write memory");
  }
}

bool RmwPort::cas(std::size_t local, Value expected, Value desired) {
  std::size_t g = resolve(local);
  Value before = memory_->load(g);
  bool ok = before == expected;
  if (ok) memory_->store(g, desired);
  record(AccessKind::Cas, local, g, before, ok ? desired : before, ok);
  return ok;
}

}  // namespace anonmem
