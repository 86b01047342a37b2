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

#include "anonmem/error.hpp"
#include "anonmem/explorer.hpp"
#include "anonmem/properties.hpp"
#include "anonmem/simulator.hpp"

using namespace anonmem;

namespace {

RunConfig config(ProtocolKind kind, std::size_t n, std::size_t m,
                 std::vector<std::uint64_t> inputs = {}) {
  RunConfig c;
  c.protocol = kind;
  c.n = n;
  c.m = m;
  c.inputs = std::move(inputs);
  return c;
}

}  // namespace

TEST_CASE("mutual exclusion on the exhaustive two-process graph") {
  for (std::uint64_t i = 0; i < 6; ++i) {
    RunConfig c = config(ProtocolKind::Mutex, 2, 3);
    c.perms = PermutationTable::enumerate(2, 3, i);
    Simulator sim(c);
    StateGraph g = explore(sim, {});
    REQUIRE_FALSE(g.truncated());
    CHECK(check_mutual_exclusion(g).holds == Holds::True);
    CHECK(check_ladder(g).holds == Holds::True);
    CHECK(check_ownership_partition(g).holds == Holds::True);
    CHECK(check_round_progress(g).holds == Holds::True);
  }
}

TEST_CASE("mutual exclusion negative control and vacuous case") {
  Trace fake;
  fake.config = config(ProtocolKind::Mutex, 2, 3);
  fake.config.validate();
  fake.schedule = parse_schedule("S1 S2");
  fake.steps.push_back({Directive::step(0), {}, {ProcessStatus::InCS, ProcessStatus::Active}});
  fake.steps.push_back({Directive::step(1), {}, {ProcessStatus::InCS, ProcessStatus::InCS}});
  Verdict v = check_mutual_exclusion(fake);
  CHECK(v.holds == Holds::False);
  REQUIRE(v.witness);
  CHECK(v.witness->schedule.size() == 2);

  Simulator sim(config(ProtocolKind::Mutex, 2, 3));
  CHECK(check_mutual_exclusion(run(sim, parse_schedule("S1*18"))).ok());
  CHECK(check_ladder(run(sim, parse_schedule("S1*18"))).ok());

  Simulator cons(config(ProtocolKind::Consensus, 2, 1, {1, 2}));
  CHECK_THROWS_AS(check_mutual_exclusion(run(cons, {})), ConfigError);
  CHECK_THROWS_AS(check_deadlock_freedom(explore(cons, {})), ConfigError);
}

TEST_CASE("ladder fails when two processes share a two-register memory") {
  RunConfig c = config(ProtocolKind::Mutex, 2, 2);
  c.perms = PermutationTable::rotations(2, 2, 1);
  Simulator sim(c);
  Verdict v = check_ladder(run(sim, lockstep_schedule(c, 12)));
  CHECK(v.holds == Holds::False);
  REQUIRE(v.witness);
  CHECK(confirm_witness("ladder", *v.witness));
}

TEST_CASE("deadlock freedom: two registers, two processes") {
  RunConfig c = config(ProtocolKind::Mutex, 2, 2);
  c.perms = PermutationTable::rotations(2, 2, 1);
  Simulator sim(c);
  StateGraph g = explore(sim, {});
  REQUIRE_FALSE(g.truncated());
  Verdict v = check_deadlock_freedom(g);
  CHECK(v.holds == Holds::False);
  REQUIRE(v.witness);
  CHECK(v.witness->cycle_start.has_value());
  CHECK(confirm_witness("deadlock_freedom", *v.witness));
}

TEST_CASE("deadlock freedom on a truncated graph is not True") {
  Simulator sim(config(ProtocolKind::Mutex, 2, 3));
  ExploreBounds b;
  b.max_depth = 8;
  Verdict v = check_deadlock_freedom(explore(sim, b));
  CHECK(v.holds == Holds::Inconclusive);
  CHECK(check_round_progress(explore(sim, b)).holds != Holds::True);
}

TEST_CASE("every false progress verdict replays") {
  for (std::uint64_t i = 0; i < 6; ++i) {
    RunConfig c = config(ProtocolKind::Mutex, 2, 3);
    c.perms = PermutationTable::enumerate(2, 3, i);
    Simulator sim(c);
    Verdict v = check_deadlock_freedom(explore(sim, {}));
    if (v.holds == Holds::False) {
      REQUIRE(v.witness);
      CHECK(confirm_witness("deadlock_freedom", *v.witness));
      // A one-token edit must not keep the witness valid by accident.
      Witness edited = *v.witness;
      edited.schedule.pop_back();
      CHECK_FALSE(confirm_witness("deadlock_freedom", edited));
    }
  }
}

TEST_CASE("the round reset keeps owned registers") {
  // p2 is at round 1 owning R1 and R2, then reads p1's round 2 while p1
  // releases and resets to round 0. Its values stay in memory, it never
  // sees an empty memory again, and nobody can enter.
  RunConfig c = config(ProtocolKind::Mutex, 2, 3);
  Simulator sim(c);
  StateGraph g = explore(sim, {});
  Verdict v = check_deadlock_freedom(g);
  REQUIRE(v.holds == Holds::False);
  REQUIRE(v.witness->stuck_at);
  Trace t = run(sim, Schedule(v.witness->schedule.begin(),
                              v.witness->schedule.begin() +
                                  static_cast<std::ptrdiff_t>(*v.witness->stuck_at)));
  const GlobalState& s = t.final_state;
  bool someone_owns_at_round_zero = false;
  for (std::uint32_t p = 0; p < 2; ++p) {
    const auto& m = std::get<MutexState>(s.procs[p].local);
    if (m.round == 0 && m.owned() > 0 && MutexProtocol::pending_acquire(m)) {
      someone_owns_at_round_zero = true;
    }
  }
  CHECK(someone_owns_at_round_zero);
}

TEST_CASE("livelock detection") {
  Simulator cons(config(ProtocolKind::Consensus, 2, 2, {1, 2}));
  ExploreBounds crashes;
  crashes.branch_on_crashes = true;
  CHECK_FALSE(detect_livelock_cycle(explore(cons, crashes)));

  RunConfig c = config(ProtocolKind::Mutex, 2, 3);
  Simulator sim(c);
  ExploreBounds lock;
  lock.lockstep = true;
  CHECK_FALSE(detect_livelock_cycle(explore(sim, lock)));
  CHECK_FALSE(detect_livelock_cycle(sim, lockstep_schedule(c, 40)));

  RunConfig two = config(ProtocolKind::Mutex, 2, 2);
  two.perms = PermutationTable::rotations(2, 2, 1);
  Simulator sim2(two);
  auto w = detect_livelock_cycle(sim2, lockstep_schedule(two, 40));
  REQUIRE(w);
  CHECK(confirm_witness("livelock", *w));
}

TEST_CASE("agreement and validity on decision sets") {
  CHECK(check_agreement({3, 3, 3}, 1).ok());
  CHECK(check_agreement({1, 2, 3}, 2).holds == Holds::False);
  CHECK(check_agreement({}, 1).ok());
  CHECK(check_validity({5}, {3, 5}).ok());
  CHECK(check_validity({4}, {3, 5}).holds == Holds::False);
  CHECK(check_validity({}, {3, 5}).ok());
}

TEST_CASE("wait freedom bound") {
  for (std::size_t m = 1; m <= 3; ++m) {
    Simulator sim(config(ProtocolKind::Consensus, 2, m, {3, 5}));
    Trace t = run(sim, random_schedule(sim, m, 100, 0.0));
    CHECK(check_wait_freedom_bound(t, 2 * m).ok());
    CHECK(check_wait_freedom_bound(t, 2 * m - 1).holds == Holds::False);
    Trace crashed = run(sim, parse_schedule("S1 C1 S2*" + std::to_string(2 * m)));
    CHECK(check_wait_freedom_bound(crashed, 2 * m).ok());
  }
  Simulator sim(config(ProtocolKind::Consensus, 2, 2, {3, 5}));
  StateGraph g = explore(sim, {});
  CHECK(check_wait_freedom_bound(g, 4).ok());
  CHECK(check_wait_freedom_bound(g, 3).holds == Holds::False);
}

TEST_CASE("obstruction freedom") {
  Simulator cons(config(ProtocolKind::Consensus, 2, 2, {3, 5}));
  CHECK(check_obstruction_freedom(explore(cons, {}), 4).ok());

  Simulator sa(config(ProtocolKind::SetAgreement, 2, 3, {1, 2}));
  ExploreBounds b;
  b.branch_on_choice = true;
  b.max_depth = 12;
  StateGraph g = explore(sa, b);
  REQUIRE(g.truncated());
  CHECK(check_obstruction_freedom(g, 19).holds == Holds::Inconclusive);
  Verdict one = check_obstruction_freedom(g, 1);
  CHECK(one.holds == Holds::False);
  REQUIRE(one.witness);
}

TEST_CASE("agreement sweep over a set-agreement graph") {
  Simulator sa(config(ProtocolKind::SetAgreement, 2, 3, {1, 2}));
  ExploreBounds b;
  b.branch_on_choice = true;
  b.max_depth = 24;
  StateGraph g = explore(sa, b);
  CHECK(check_agreement(g, 1).ok());
  CHECK(check_validity(g).ok());
}

TEST_CASE("termination of the abortable lock") {
  RunConfig c = config(ProtocolKind::Mutex, 2, 3);
  c.abortable = true;
  Simulator sim(c);
  StateGraph g = explore(sim, {});
  CHECK(check_termination(g).ok());
  CHECK(check_mutual_exclusion(g).ok());
}

TEST_CASE("hunt edge cases") {
  RunConfig c = config(ProtocolKind::SetAgreement, 2, 3, {1, 2});
  HuntOptions o;
  o.walks = 300;
  CHECK(hunt_agreement_violation(c, o).holds == Holds::Inconclusive);
  HuntOptions none;
  none.walks = 0;
  CHECK(hunt_agreement_violation(config(ProtocolKind::SetAgreement, 3, 5, {1, 2, 3}), none).holds ==
        Holds::Inconclusive);
  CHECK_THROWS_AS(hunt_agreement_violation(config(ProtocolKind::Consensus, 2, 1, {1, 2}), o),
                  ConfigError);
}

TEST_CASE("agreement witnesses are checked on replay") {
  // Three processes on three registers disagree easily.
  RunConfig c = config(ProtocolKind::SetAgreement, 3, 3, {1, 2, 3});
  HuntOptions o;
  o.walks = 20'000;
  Verdict v = hunt_agreement_violation(c, o);
  REQUIRE(v.holds == Holds::False);
  REQUIRE(v.witness);
  CHECK(confirm_witness("agreement", *v.witness, 1));
  CHECK_FALSE(confirm_witness("agreement", *v.witness, 2));
  Witness bogus{c, parse_schedule("S1"), {}, {}};
  CHECK_FALSE(confirm_witness("agreement", bogus, 1));
}

TEST_CASE("sampled progress probe returns replayable witnesses") {
  RunConfig c = config(ProtocolKind::Mutex, 2, 3);
  ProbeOptions o;
  o.walks = 50;
  o.walk_length = 2000;
  Verdict v = probe_deadlock_freedom(c, o);
  CHECK(v.holds != Holds::True);
  if (v.holds == Holds::False) CHECK(confirm_witness("deadlock_freedom", *v.witness));
}

TEST_CASE("verdict records") {
  Verdict v;
  v.property = "agreement";
  v.holds = Holds::Inconclusive;
  v.states = 12;
  CHECK(v.record("w.txt") == "property=agreement holds=inconclusive witness=w.txt states=12 wall_ms=0");
}
