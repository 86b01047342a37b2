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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "anonmem/value.hpp"

namespace anonmem {

/// Register capability of a memory instance. RW memories refuse to hand
/// out a compare-and-swap port.
enum class RegisterModel : std::uint8_t { ReadWrite, ReadModifyWrite };

std::string_view to_string(RegisterModel model);

/// A bijection over local register indices {0, ..., m-1}. Textual forms use
/// 1-based indices.
class Permutation {
 public:
  Permutation() = default;
  /// Validates bijectivity; throws ConfigError otherwise.
  explicit Permutation(std::vector<std::uint32_t> zero_based);

  static Permutation identity(std::size_t m);
  static Permutation from_one_based(const std::vector<std::uint32_t>& image);

  std::size_t size() const { return map_.size(); }
  std::size_t operator()(std::size_t local) const { return map_[local]; }
  const std::vector<std::uint32_t>& image() const { return map_; }
  bool is_identity() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::uint32_t> map_;
};

/// One permutation per process. Process 0 is the identity in every
/// generated table; relabelling the global registers makes that choice
/// lossless.
class PermutationTable {
 public:
  PermutationTable() = default;
  explicit PermutationTable(std::vector<Permutation> perms);

  static PermutationTable identity(std::size_t n, std::size_t m);
  /// f_1 = identity, the rest uniformly shuffled from `seed`.
  static PermutationTable seeded(std::size_t n, std::size_t m, std::uint64_t seed);
  /// Mixed-radix unranking over m!^(n-1) tables; index 0 is all-identity.
  static PermutationTable enumerate(std::size_t n, std::size_t m, std::uint64_t index);
  /// m!^(n-1), throws ConfigError if it does not fit in 64 bits.
  static std::uint64_t enumeration_size(std::size_t n, std::size_t m);
  /// f_i(x) = (x + i * shift) mod m. With shift = m / d for a common divisor
  /// d of n and m, d processes see rotated but identical views of the memory.
  static PermutationTable rotations(std::size_t n, std::size_t m, std::size_t shift);

  /// "2,3,1;3,1,2" (1-based, one group per process).
  static PermutationTable parse(std::string_view text);
  std::string to_string() const;

  std::size_t processes() const { return perms_.size(); }
  std::size_t registers() const { return perms_.empty() ? 0 : perms_.front().size(); }
  const Permutation& operator[](std::size_t pid) const { return perms_[pid]; }

  friend bool operator==(const PermutationTable&, const PermutationTable&) = default;

 private:
  std::vector<Permutation> perms_;
};

/// The array R[0..m-1] in global indexing. Every cell starts at bottom.
class AnonymousMemory {
 public:
  AnonymousMemory() = default;
  AnonymousMemory(std::size_t m, RegisterModel model);

  std::size_t size() const { return cells_.size(); }
  RegisterModel model() const { return model_; }

  /// Observer snapshot. Not a process step.
  const std::vector<Value>& global_view() const { return cells_; }

  Value load(std::size_t global) const { return cells_.at(global); }
  void store(std::size_t global, Value v) { cells_.at(global) = v; }

  friend bool operator==(const AnonymousMemory&, const AnonymousMemory&) = default;

 private:
  std::vector<Value> cells_;
  RegisterModel model_ = RegisterModel::ReadWrite;
};

enum class AccessKind : std::uint8_t { Read, Write, Cas };

std::string_view to_string(AccessKind kind);

/// One shared access. `before`/`after` are the register contents around the
/// access, so a read has before == after and a failed cas leaves them equal
/// with ok == false.
struct MemoryEvent {
  std::uint64_t step = 0;  // 1-based ordinal in the trace
  std::uint32_t pid = 0;
  AccessKind op = AccessKind::Read;
  std::uint32_t local = 0;
  std::uint32_t global = 0;
  Value before;
  Value after;
  bool ok = true;

  /// `step=3 pid=1 op=cas local=2 global=3 old=B new=1 ok=1` (1-based).
  std::string to_line() const;
  static MemoryEvent parse_line(std::string_view line);

  friend bool operator==(const MemoryEvent&, const MemoryEvent&) = default;
};

/// Read/write access to the memory through one process's permutation.
/// This is all a protocol step machine ever sees of the shared memory.
class ReadWritePort {
 public:
  ReadWritePort(AnonymousMemory& memory, const Permutation& perm, std::uint32_t pid,
                std::vector<MemoryEvent>* log = nullptr);
  // The port keeps a pointer to the permutation.
  ReadWritePort(AnonymousMemory&, Permutation&&, std::uint32_t,
                std::vector<MemoryEvent>* = nullptr) = delete;

  std::size_t size() const { return perm_->size(); }
  Value read(std::size_t local);
  void write(std::size_t local, Value v);

  /// Shared accesses issued through this port so far.
  std::size_t accesses() const { return accesses_; }

 protected:
  std::size_t resolve(std::size_t local) const;
  void record(AccessKind op, std::size_t local, std::size_t global, Value before, Value after,
              bool ok);

  AnonymousMemory* memory_;

 private:
  const Permutation* perm_;
  std::uint32_t pid_;
  std::vector<MemoryEvent>* log_;
  std::size_t accesses_ = 0;
};

/// Adds compare-and-swap. Construction fails on a read/write memory.
class RmwPort : public ReadWritePort {
 public:
  RmwPort(AnonymousMemory& memory, const Permutation& perm, std::uint32_t pid,
          std::vector<MemoryEvent>* log = nullptr);
  RmwPort(AnonymousMemory&, Permutation&&, std::uint32_t, std::vector<MemoryEvent>* = nullptr) = delete;

  bool cas(std::size_t local, Value expected, Value desired);
};

}  // namespace anonmem
