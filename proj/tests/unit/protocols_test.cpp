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

#include <random>

#include "anonmem/error.hpp"
#include "anonmem/simulator.hpp"
#include "../oracles.hpp"

using namespace anonmem;
using Pc = MutexState::Pc;

namespace {

RunConfig mutex_config(std::size_t n, std::size_t m) {
  RunConfig c;
  c.protocol = ProtocolKind::Mutex;
  c.n = n;
  c.m = m;
  return c;
}

RunConfig agreement_config(ProtocolKind kind, std::size_t m, std::vector<std::uint64_t> inputs) {
  RunConfig c;
  c.protocol = kind;
  c.n = inputs.size();
  c.m = m;
  c.inputs = std::move(inputs);
  return c;
}

const MutexState& mutex_of(const GlobalState& g, std::uint32_t pid) {
  return std::get<MutexState>(g.procs[pid].local);
}

std::vector<std::int64_t> as_ints(const AnonymousMemory& mem) {
  std::vector<std::int64_t> out;
  for (auto v : mem.global_view()) {
    out.push_back(v.is_bottom() ? oracle::kBottom : static_cast<std::int64_t>(v.payload()));
  }
  return out;
}

// Steps pid until the first outcome of `kind`; returns the accesses used.
std::size_t steps_until(const Simulator& sim, GlobalState& g, std::uint32_t pid, Outcome kind) {
  for (std::size_t i = 1; i < 100'000; ++i) {
    if (sim.apply(g, Directive::step(pid)).kind == kind) return i;
  }
  FAIL("outcome never reached");
  return 0;
}

}  // namespace

TEST_CASE("mutex initial state") {
  MutexProtocol proto({2, 3, false, ExitRule::RoundReachesN, 1});
  auto s = proto.init();
  CHECK(s.round == 0);
  CHECK(s.counter == 0);
  CHECK(s.myview == std::vector<bool>{false, false, false});
  CHECK(s.pc == Pc::ScanMax);
  CHECK(s == proto.init());
  MutexProtocol ab({2, 3, true, ExitRule::RoundReachesN, 1});
  CHECK(ab.init() == s);
  CHECK(ab.options().abortable);
}

TEST_CASE("solo mutex matches the reference interpreter") {
  for (int n = 2; n <= 4; ++n) {
    for (int m = 1; m <= 9; ++m) {
      for (bool owns_all : {false, true}) {
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(owns_all);
        auto ref = oracle::solo_mutex(n, m, owns_all);
        RunConfig c = mutex_config(n, m);
        if (owns_all) c.exit_rule = ExitRule::OwnsAllRegisters;
        Simulator sim(c);
        GlobalState g = sim.initial_state();
        CHECK(steps_until(sim, g, 0, Outcome::EnteredCS) == ref.accesses_to_cs);
        CHECK(as_ints(g.memory) == ref.memory_in_cs);
        CHECK(sim.in_critical_section(g) == 1);
        std::size_t release = steps_until(sim, g, 0, Outcome::Done);
        CHECK(ref.accesses_to_cs + release == ref.accesses_total);
        CHECK(as_ints(g.memory) == ref.memory_after);
      }
    }
  }
}

TEST_CASE("solo mutex n=2 m=3 enters after 15 accesses") {
  // 3 scan reads, 3 claims, 3 scan reads, 3 confirm writes, 3 probe reads.
  CHECK(oracle::solo_mutex(2, 3).accesses_to_cs == 15);
  Simulator sim(mutex_config(2, 3));
  GlobalState g = sim.initial_state();
  CHECK(steps_until(sim, g, 0, Outcome::EnteredCS) == 15);
  CHECK(sim.status(g, 0) == ProcessStatus::InCS);
  CHECK(sim.apply(g, Directive::step(0)).kind == Outcome::ExitedCS);
  sim.apply(g, Directive::step(0));
  CHECK(sim.apply(g, Directive::step(0)).kind == Outcome::Done);
  CHECK(sim.status(g, 0) == ProcessStatus::Done);
  CHECK_THROWS_AS(sim.apply(g, Directive::step(0)), ScheduleError);
}

namespace {

// p1 and p2 scan an empty memory, then p1 claims R1, R2 and p2 claims R3.
GlobalState split_two_one(const Simulator& sim) {
  GlobalState g = sim.initial_state();
  for (auto d : parse_schedule("S1*3 S2*3 S1*2 S2*3 S1")) sim.apply(g, d);
  return g;
}

}  // namespace

TEST_CASE("a contender owning one of three registers withdraws and waits") {
  Simulator sim(mutex_config(2, 3));
  GlobalState g = split_two_one(sim);
  CHECK(mutex_of(g, 0).counter == 2);
  CHECK(mutex_of(g, 1).counter == 1);
  CHECK(mutex_of(g, 1).pc == Pc::Withdraw);
  sim.apply(g, Directive::step(1));  // R3 <- B
  CHECK(g.memory.load(2).is_bottom());
  CHECK(mutex_of(g, 1).pc == Pc::AwaitEmpty);
  CHECK(mutex_of(g, 1).counter == 1);  // reset only after the wait
  for (int i = 0; i < 10; ++i) {
    sim.apply(g, Directive::step(1));
    CHECK(mutex_of(g, 1).pc == Pc::AwaitEmpty);
    CHECK(mutex_of(g, 1).cursor == 0);  // R1 is owned by p1: rescan
  }
}

TEST_CASE("abortable variant aborts instead of waiting") {
  RunConfig c = mutex_config(2, 3);
  c.abortable = true;
  Simulator sim(c);
  GlobalState g = split_two_one(sim);
  CHECK(sim.apply(g, Directive::step(1)).kind == Outcome::Aborted);  // R3 <- B, then abort
  CHECK(g.memory.load(2).is_bottom());
  CHECK(sim.status(g, 1) == ProcessStatus::Aborted);
  CHECK(steps_until(sim, g, 0, Outcome::EnteredCS) > 0);
}

TEST_CASE("seeing a higher round: reset to 0, or abort") {
  // p1 claims all three registers; p2 then scans values 1,1,1 at round 0.
  auto sched = parse_schedule("S1*6 S2*3");
  {
    Simulator sim(mutex_config(2, 3));
    Trace t = run(sim, sched);
    const auto& s = mutex_of(t.final_state, 1);
    CHECK(s.round == 0);
    CHECK(s.pc == Pc::ScanMax);
    CHECK(s.counter == 0);
  }
  {
    RunConfig c = mutex_config(2, 3);
    c.abortable = true;
    Simulator sim(c);
    Trace t = run(sim, sched);
    CHECK(t.steps.back().outcome.kind == Outcome::Aborted);
  }
}

TEST_CASE("mutex counter tracks myview") {
  Simulator sim(mutex_config(3, 5));
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GlobalState g = sim.initial_state();
    for (auto d : random_schedule(sim, seed, 300, 0.0)) {
      if (!sim.enabled(g, d.pid)) break;
      sim.apply(g, d);
      for (std::uint32_t p = 0; p < 3; ++p) {
        // Withdrawal and release clear myview before the counter is reset.
        const auto& s = mutex_of(g, p);
        CHECK(s.counter >= s.owned());
        if (MutexProtocol::pending_acquire(s) && s.pc != Pc::Withdraw && s.pc != Pc::AwaitEmpty) {
          CHECK(s.counter == s.owned());
        }
        CHECK(s.round <= 3);
      }
    }
  }
}

TEST_CASE("consensus init") {
  ConsensusProtocol proto(2);
  CHECK(proto.init(5).input == 5);
  CHECK(proto.init(0).input == 0);
  CHECK(proto.init(4) == proto.init(4));
  CHECK_THROWS_AS(proto.init(Value::kMaxPayload + 1), ConfigError);
}

TEST_CASE("consensus runs") {
  {
    Simulator sim(agreement_config(ProtocolKind::Consensus, 2, {7, 9}));
    Trace t = run(sim, parse_schedule("S1*4"));
    CHECK(as_ints(t.final_state.memory) == std::vector<std::int64_t>{7, 7});
    CHECK(t.steps.back().outcome == StepOutcome::decided(7));
    CHECK(t.accesses_by(0) == 4);
  }
  {
    Simulator sim(agreement_config(ProtocolKind::Consensus, 1, {3, 5}));
    Trace t = run(sim, parse_schedule("S1 S2 S1 S2"));
    CHECK(sim.decisions(t.final_state) == std::vector<std::uint64_t>{3, 3});
  }
  {
    RunConfig c = agreement_config(ProtocolKind::Consensus, 2, {3, 5});
    c.perms = PermutationTable::parse("1,2;2,1");
    Simulator sim(c);
    Trace t = run(sim, parse_schedule("S1 S2 S1 S2 S1*2 S2*2"));
    CHECK(as_ints(t.final_state.memory) == std::vector<std::int64_t>{3, 5});
    CHECK(sim.decisions(t.final_state) == std::vector<std::uint64_t>{5, 5});
    CHECK_THROWS_AS(sim.apply(t.final_state, Directive::step(0)), ScheduleError);
  }
}

TEST_CASE("set agreement init") {
  SetAgreementProtocol proto(3);
  CHECK(proto.init(4).preference == 4);
  CHECK(proto.init(4) == proto.init(4));
  CHECK(proto.init(0).preference == 0);
  CHECK(proto.init(4).pc == SetAgreementState::Pc::Collect);
}

TEST_CASE("set agreement solo run matches the interpreter") {
  auto ref = oracle::solo_set_agreement(4, 3);
  CHECK(ref.decided == 4);
  CHECK(ref.accesses == 18);
  Simulator sim(agreement_config(ProtocolKind::SetAgreement, 3, {4, 8}));
  auto solo = solo_extension(sim, sim.initial_state(), 0, 19);
  CHECK(solo.outcome == StepOutcome::decided(4));
  CHECK(solo.steps == ref.accesses);
}

TEST_CASE("set agreement solo from arbitrary memories") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    int m = 3 + static_cast<int>(rng() % 5);
    std::vector<std::int64_t> cells(m);
    RunConfig c = agreement_config(ProtocolKind::SetAgreement, m, {1, 2});
    Simulator sim(c);
    GlobalState g = sim.initial_state();
    for (int j = 0; j < m; ++j) {
      cells[j] = static_cast<std::int64_t>(rng() % 4) - 1;
      if (cells[j] >= 0) g.memory.store(j, Value::of(cells[j]));
    }
    auto ref = oracle::solo_set_agreement(1, m, cells);
    auto solo = solo_extension(sim, g, 0, 1000);
    CAPTURE(m);
    CHECK(solo.outcome == StepOutcome::decided(static_cast<std::uint64_t>(ref.decided)));
    CHECK(solo.steps == ref.accesses);
    CHECK(solo.steps <= static_cast<std::size_t>((m + 1) * (m + 1) + m));
  }
}

TEST_CASE("strict majority adoption") {
  SetAgreementProtocol proto(3);
  AnonymousMemory mem(3, RegisterModel::ReadWrite);
  mem.store(0, Value::of(5));
  mem.store(1, Value::of(5));
  mem.store(2, Value::of(3));
  const auto id = Permutation::identity(3);
  ReadWritePort port(mem, id, 0);
  auto s = proto.init(3);
  for (int i = 0; i < 3; ++i) proto.step(s, port);
  CHECK(s.preference == 5);
  CHECK(s.pc == SetAgreementState::Pc::Write);
  CHECK(proto.write_candidates(s) == std::vector<std::uint32_t>{2});

  // 2 of 4 is not a strict majority.
  SetAgreementProtocol four(4);
  AnonymousMemory mem4(4, RegisterModel::ReadWrite);
  mem4.store(0, Value::of(5));
  mem4.store(1, Value::of(5));
  const auto id4 = Permutation::identity(4);
  ReadWritePort port4(mem4, id4, 0);
  auto t = four.init(3);
  for (int i = 0; i < 4; ++i) four.step(t, port4);
  CHECK(t.preference == 3);
  CHECK(four.write_candidates(t) == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("write choices") {
  SetAgreementProtocol proto(3);
  AnonymousMemory mem(3, RegisterModel::ReadWrite);
  const auto id = Permutation::identity(3);
  ReadWritePort port(mem, id, 0);
  auto s = proto.init(4);
  CHECK(proto.write_candidates(s).empty());
  CHECK_THROWS_AS(proto.step(s, port, 1u), ScheduleError);
  for (int i = 0; i < 3; ++i) proto.step(s, port);
  CHECK(proto.write_candidates(s) == std::vector<std::uint32_t>{0, 1, 2});
  proto.step(s, port, 2u);
  CHECK(mem.load(2) == Value::of(4));
  CHECK(mem.load(0).is_bottom());
}

TEST_CASE("two-process set agreement never disagrees on random runs") {
  RunConfig c = agreement_config(ProtocolKind::SetAgreement, 3, {1, 2});
  c.choice = ChoicePolicy::Random;
  Simulator sim(c);
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    Trace t = run(sim, random_schedule(sim, seed, 400, 0.0));
    auto d = sim.decisions(t.final_state);
    if (d.size() == 2) CHECK(d[0] == d[1]);
  }
}
