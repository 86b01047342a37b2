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

#include <algorithm>
#include <set>

#include "anonmem/error.hpp"
#include "anonmem/memory.hpp"
#include "anonmem/simulator.hpp"
#include "anonmem/value.hpp"

using namespace anonmem;

namespace {

Permutation perm(std::vector<std::uint32_t> one_based) {
  return Permutation::from_one_based(one_based);
}

}  // namespace

TEST_CASE("bottom orders below every payload") {
  CHECK(Value::bottom() < Value::of(0));
  CHECK(Value::of(0) < Value::of(1));
  CHECK(Value::bottom().is_bottom());
  CHECK(Value::of(7).payload() == 7);
  CHECK(Value::bottom().to_string() == "B");
  CHECK(Value::parse("B") == Value::bottom());
  CHECK(Value::parse("12") == Value::of(12));
  CHECK_THROWS_AS(Value::parse("x"), ConfigError);
}

TEST_CASE("fresh memory is all bottom") {
  for (std::size_t m : {1u, 3u, 7u}) {
    AnonymousMemory mem(m, RegisterModel::ReadModifyWrite);
    REQUIRE(mem.size() == m);
    for (auto v : mem.global_view()) CHECK(v.is_bottom());
  }
  CHECK_THROWS_AS(AnonymousMemory(0, RegisterModel::ReadWrite), ConfigError);
}

TEST_CASE("permutations must be bijections") {
  CHECK_THROWS_AS(perm({1, 1, 2}), ConfigError);
  CHECK_THROWS_AS(perm({1, 4, 2}), ConfigError);
  CHECK_THROWS_AS(perm({0, 1, 2}), ConfigError);
  CHECK(perm({1, 2, 3}).is_identity());
}

TEST_CASE("permutation tables") {
  auto t = PermutationTable::parse("1,2,3;3,1,2");
  CHECK(t.processes() == 2);
  CHECK(t[1](0) == 2);
  CHECK(t.to_string() == "1,2,3;3,1,2");

  // The two-process illustration table: neither process has the identity.
  auto u = PermutationTable::parse("2,3,1;3,1,2");
  CHECK(u[0](0) == 1);
  CHECK(u[1](0) == 2);

  CHECK(PermutationTable::enumerate(2, 3, 0) == PermutationTable::identity(2, 3));
  CHECK(PermutationTable::enumeration_size(2, 3) == 6);
  CHECK(PermutationTable::enumeration_size(3, 3) == 36);
  CHECK_THROWS_AS(PermutationTable::enumerate(2, 3, 6), ConfigError);
  CHECK_THROWS_AS(PermutationTable::parse("1,2;1,1"), ConfigError);

  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < 36; ++i) {
    auto e = PermutationTable::enumerate(3, 3, i);
    CHECK(e[0].is_identity());
    seen.insert(e.to_string());
  }
  CHECK(seen.size() == 36);

  auto s = PermutationTable::seeded(3, 5, 42);
  CHECK(s[0].is_identity());
  CHECK(s == PermutationTable::seeded(3, 5, 42));

  auto r = PermutationTable::rotations(2, 2, 1);
  CHECK(r.to_string() == "1,2;2,1");
}

TEST_CASE("ports address through the permutation") {
  AnonymousMemory mem(3, RegisterModel::ReadModifyWrite);
  auto t = PermutationTable::parse("1,2,3;3,1,2");
  std::vector<MemoryEvent> log;
  RmwPort p1(mem, t[0], 0, &log);
  RmwPort p2(mem, t[1], 1, &log);

  CHECK(p2.read(1).is_bottom());
  p1.write(0, Value::of(5));
  CHECK(p1.read(0) == Value::of(5));
  mem.store(2, Value::of(9));
  CHECK(p2.read(0) == Value::of(9));

  p1.write(1, Value::of(4));
  CHECK(mem.global_view()[1] == Value::of(4));
  p1.write(1, Value::of(6));
  CHECK(p1.read(1) == Value::of(6));
  p1.write(1, Value::bottom());
  CHECK(mem.global_view()[1].is_bottom());

  CHECK_THROWS_AS(p1.read(3), ConfigError);
  CHECK_THROWS_AS(p1.write(7, Value::of(1)), ConfigError);

  for (const auto& e : log) {
    CHECK(e.global == t[e.pid](e.local));
  }
  CHECK(p1.accesses() + p2.accesses() == log.size());
}

TEST_CASE("cas semantics") {
  AnonymousMemory mem(1, RegisterModel::ReadModifyWrite);
  const auto id = Permutation::identity(1);
  RmwPort p(mem, id, 0);
  CHECK(p.cas(0, Value::bottom(), Value::of(1)));
  CHECK(mem.load(0) == Value::of(1));
  mem.store(0, Value::of(2));
  CHECK_FALSE(p.cas(0, Value::bottom(), Value::of(1)));
  CHECK(mem.load(0) == Value::of(2));
  mem.store(0, Value::of(1));
  CHECK(p.cas(0, Value::of(1), Value::bottom()));
  CHECK(mem.load(0).is_bottom());
  CHECK(p.accesses() == 3);
}

TEST_CASE("read/write memory refuses cas ports") {
  AnonymousMemory mem(3, RegisterModel::ReadWrite);
  const auto id = Permutation::identity(3);
  CHECK_THROWS_AS(RmwPort(mem, id, 0), ConfigError);
  ReadWritePort ok(mem, id, 0);
  CHECK(ok.read(2).is_bottom());
}

TEST_CASE("global view composes permutations") {
  AnonymousMemory mem(2, RegisterModel::ReadModifyWrite);
  CHECK(mem.global_view() == std::vector<Value>{Value::bottom(), Value::bottom()});
  const auto id = Permutation::identity(2), swap = perm({2, 1});
  RmwPort a(mem, id, 0);
  RmwPort b(mem, swap, 1);
  a.write(0, Value::of(3));
  CHECK(mem.global_view() == std::vector<Value>{Value::of(3), Value::bottom()});
  b.write(0, Value::of(5));
  CHECK(mem.global_view() == std::vector<Value>{Value::of(3), Value::of(5)});
}

TEST_CASE("event lines round-trip") {
  MemoryEvent e{3, 0, AccessKind::Cas, 1, 2, Value::bottom(), Value::of(1), true};
  CHECK(e.to_line() == "step=3 pid=1 op=cas local=2 global=3 old=B new=1 ok=1");
  CHECK(MemoryEvent::parse_line(e.to_line()) == e);
  CHECK_THROWS_AS(MemoryEvent::parse_line("step=1 pid=1"), ConfigError);
  CHECK_THROWS_AS(MemoryEvent::parse_line("step=1 pid=1 op=swap local=1 global=1 old=B new=B ok=1"),
                  ConfigError);
}

TEST_CASE("relabelling the registers leaves runs observationally identical") {
  // Replace every f_i by pi o f_i: local reads, decisions and statuses stay
  // the same, only global indices move.
  RunConfig base;
  base.protocol = ProtocolKind::SetAgreement;
  base.n = 3;
  base.m = 5;
  base.inputs = {1, 2, 3};
  base.perms = PermutationTable::seeded(3, 5, 9);
  const std::vector<std::uint32_t> pi{3, 0, 4, 1, 2};
  std::vector<Permutation> moved;
  for (std::size_t p = 0; p < 3; ++p) {
    std::vector<std::uint32_t> img(5);
    for (std::size_t x = 0; x < 5; ++x) img[x] = pi[base.perms[p](x)];
    moved.emplace_back(img);
  }
  RunConfig relabelled = base;
  relabelled.perms = PermutationTable(moved);

  Simulator sa(base), sb(relabelled);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto sched = random_schedule(sa, seed, 400, 0.0);
    Trace a = run(sa, sched), b = run(sb, sched);
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      auto ea = a.events[i], eb = b.events[i];
      CHECK(eb.global == pi[ea.global]);
      eb.global = ea.global;
      CHECK(ea == eb);
    }
    CHECK(sa.decisions(a.final_state) == sb.decisions(b.final_state));
  }
}
