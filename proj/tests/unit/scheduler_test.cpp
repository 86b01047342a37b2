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

#include <map>
#include <stdexcept>

#include "anonmem/error.hpp"
#include "anonmem/explorer.hpp"
#include "anonmem/minimize.hpp"
#include "anonmem/properties.hpp"
#include "anonmem/simulator.hpp"
#include "../oracles.hpp"

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

TEST_CASE("schedule syntax") {
  auto s = parse_schedule("S1 S2:3 C1 S2*3");
  REQUIRE(s.size() == 6);
  CHECK(s[0] == Directive::step(0));
  CHECK(s[1] == Directive::step(1, 2u));
  CHECK(s[2] == Directive::crash(0));
  CHECK(s[5] == Directive::step(1));
  CHECK(format_schedule(s) == "S1 S2:3 C1 S2 S2 S2");
  CHECK(parse_schedule("  ").empty());
  CHECK_THROWS_AS(parse_schedule("S1*0"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("X1"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("S0"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("C1:2"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("S1*"), ConfigError);
}

TEST_CASE("run: consensus examples") {
  Simulator sim(config(ProtocolKind::Consensus, 2, 1, {3, 5}));
  Trace a = run(sim, parse_schedule("S1*2 S2*2"));
  CHECK(sim.decisions(a.final_state) == std::vector<std::uint64_t>{3, 3});
  CHECK(a.events.size() == 4);
  CHECK_FALSE(a.truncated);

  Trace b = run(sim, parse_schedule("C1 S2*2"));
  CHECK(sim.status(b.final_state, 0) == ProcessStatus::Crashed);
  CHECK(sim.decision(b.final_state, 1) == 5u);
  CHECK(b.accesses_by(0) == 0);

  CHECK_THROWS_AS(run(sim, parse_schedule("C1 S1")), ScheduleError);
  CHECK_THROWS_AS(run(sim, parse_schedule("S1*3")), ScheduleError);
  CHECK_THROWS_AS(run(sim, parse_schedule("S3")), ScheduleError);
  CHECK_THROWS_AS(run(sim, parse_schedule("S1:1")), ScheduleError);
}

TEST_CASE("run: mutex rejects crashes") {
  Simulator sim(config(ProtocolKind::Mutex, 2, 3));
  CHECK_THROWS_AS(run(sim, parse_schedule("C1")), ConfigError);
  Trace t = run(sim, parse_schedule("S1*15"));
  CHECK(sim.status(t.final_state, 0) == ProcessStatus::InCS);
}

TEST_CASE("run: step budget truncates") {
  RunConfig c = config(ProtocolKind::Mutex, 2, 3);
  c.step_budget = 5;
  Trace t = run(c, parse_schedule("S1*10"));
  CHECK(t.truncated);
  CHECK(t.schedule.size() == 5);
}

TEST_CASE("run is deterministic and events replay on a plain array") {
  RunConfig c = config(ProtocolKind::SetAgreement, 3, 5, {1, 2, 3});
  c.perms = PermutationTable::seeded(3, 5, 11);
  c.choice = ChoicePolicy::Random;
  c.choice_seed = 3;
  Simulator sim(c);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto sched = random_schedule(sim, seed, 500, 0.01);
    Trace a = run(sim, sched), b = run(sim, sched);
    CHECK(a.hash() == b.hash());
    CHECK(a.events == b.events);

    std::vector<std::int64_t> cells(5, oracle::kBottom);
    auto raw = [](Value v) {
      return v.is_bottom() ? oracle::kBottom : static_cast<std::int64_t>(v.payload());
    };
    for (const auto& e : a.events) {
      CHECK(e.global == c.perms[e.pid](e.local));
      CHECK(cells[e.global] == raw(e.before));
      if (e.op == AccessKind::Read) CHECK(e.before == e.after);
      cells[e.global] = raw(e.after);
    }
    for (std::size_t j = 0; j < 5; ++j) CHECK(cells[j] == raw(a.final_state.memory.load(j)));
  }
}

TEST_CASE("lockstep schedules") {
  RunConfig c2 = config(ProtocolKind::Mutex, 2, 3);
  CHECK(format_schedule(lockstep_schedule(c2, 3)) == "S1 S2 S1 S2 S1 S2");
  RunConfig c3 = config(ProtocolKind::Mutex, 3, 5);
  CHECK(format_schedule(lockstep_schedule(c3, 1)) == "S1 S2 S3");
  CHECK_THROWS_AS(lockstep_schedule(c3, 0), ConfigError);
}

TEST_CASE("lock-step with identical tables and inputs keeps processes identical") {
  for (auto kind : {ProtocolKind::Consensus, ProtocolKind::SetAgreement}) {
    Simulator sim(config(kind, 3, 4, {6, 6, 6}));
    GlobalState g = sim.initial_state();
    for (std::size_t r = 0; r < 8; ++r) {
      for (std::uint32_t p = 0; p < 3; ++p) {
        if (sim.enabled(g, p)) sim.apply(g, Directive::step(p));
      }
      CHECK(g.procs[0] == g.procs[1]);
      CHECK(g.procs[1] == g.procs[2]);
    }
  }
}

TEST_CASE("random schedules") {
  Simulator sim(config(ProtocolKind::Consensus, 2, 2, {1, 2}));
  CHECK(random_schedule(sim, 5, 100, 0.3) == random_schedule(sim, 5, 100, 0.3));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (auto d : random_schedule(sim, seed, 100, 0.0)) CHECK(d.kind == Directive::Kind::Step);
    auto all = random_schedule(sim, seed, 100, 1.0);
    CHECK(format_schedule(all).find('S') == std::string::npos);
    std::map<std::uint32_t, int> crashes;
    for (auto d : all) ++crashes[d.pid];
    CHECK(crashes.size() == 2);
    CHECK(crashes[0] == 1);
    CHECK(crashes[1] == 1);
  }
  Simulator mutex(config(ProtocolKind::Mutex, 2, 3));
  CHECK_THROWS_AS(random_schedule(mutex, 1, 10, 0.5), ConfigError);
  CHECK_THROWS_AS(random_schedule(sim, 1, 10, 1.5), ConfigError);
}

TEST_CASE("solo extensions") {
  Simulator cons(config(ProtocolKind::Consensus, 2, 3, {4, 9}));
  auto c = solo_extension(cons, cons.initial_state(), 1, 6);
  CHECK(c.outcome == StepOutcome::decided(9));
  CHECK(c.steps == 6);
  CHECK_FALSE(solo_extension(cons, cons.initial_state(), 1, 5).progressed());

  Simulator mutex(config(ProtocolKind::Mutex, 2, 3));
  auto m = solo_extension(mutex, mutex.initial_state(), 0, 16);
  CHECK(m.outcome.kind == Outcome::EnteredCS);
  CHECK(m.steps == 15);

  Simulator sa(config(ProtocolKind::SetAgreement, 2, 3, {1, 2}));
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Trace t = run(sa, random_schedule(sa, seed, 1 + seed % 40, 0.0));
    for (std::uint32_t p = 0; p < 2; ++p) {
      if (!sa.enabled(t.final_state, p)) continue;
      CHECK(solo_extension(sa, t.final_state, p, 19).outcome.kind == Outcome::Decided);
    }
  }
}

TEST_CASE("explore matches the brute-force interleaver") {
  for (int m : {1, 2}) {
    for (bool crashes : {false, true}) {
      CAPTURE(m);
      CAPTURE(crashes);
      oracle::ConsensusInterleaver ref{m, {3, 5}, crashes, {}, {}};
      std::size_t expected = ref.count();
      Simulator sim(config(ProtocolKind::Consensus, 2, m, {3, 5}));
      ExploreBounds b;
      b.branch_on_crashes = crashes;
      StateGraph g = explore(sim, b);
      CHECK_FALSE(g.truncated());
      CHECK(g.size() == expected);

      std::set<std::vector<std::int64_t>> seen;
      for (std::uint32_t id = 0; id < g.size(); ++id) {
        if (!g.terminal(id)) continue;
        std::vector<std::int64_t> d;
        for (auto v : sim.decisions(g.state(id))) d.push_back(static_cast<std::int64_t>(v));
        seen.insert(d);
      }
      CHECK(seen == ref.terminal_decisions);
    }
  }
}

TEST_CASE("consensus n=2 m=1 terminal states agree") {
  Simulator sim(config(ProtocolKind::Consensus, 2, 1, {3, 5}));
  StateGraph g = explore(sim, {});
  std::size_t terminals = 0;
  for (std::uint32_t id = 0; id < g.size(); ++id) {
    if (!g.terminal(id)) continue;
    ++terminals;
    auto d = sim.decisions(g.state(id));
    REQUIRE(d.size() == 2);
    CHECK(d[0] == d[1]);
  }
  CHECK(terminals == 2);
}

TEST_CASE("every explored edge replays") {
  RunConfig c = config(ProtocolKind::SetAgreement, 2, 3, {1, 2});
  Simulator sim(c);
  ExploreBounds b;
  b.max_states = 3000;
  b.branch_on_choice = true;
  b.branch_on_crashes = true;
  StateGraph g = explore(sim, b);
  CHECK(g.truncated());
  for (const auto& e : g.edges()) {
    GlobalState s = g.state(e.src);
    CHECK(sim.apply(s, e.label) == e.outcome);
    CHECK(sim.encode(s) == g.key(e.dst));
  }
  for (std::uint32_t id = 0; id < g.size(); id += 97) {
    Trace t = run(sim, g.path_to(id));
    CHECK(sim.encode(t.final_state) == g.key(id));
  }
}

TEST_CASE("state encoding is lossless") {
  Simulator sim(config(ProtocolKind::Mutex, 3, 5));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Trace t = run(sim, random_schedule(sim, seed, 200, 0.0));
    CHECK(sim.decode(sim.encode(t.final_state)) == t.final_state);
  }
}

TEST_CASE("depth bound truncates") {
  Simulator sim(config(ProtocolKind::Mutex, 2, 3));
  ExploreBounds b;
  b.max_depth = 5;
  StateGraph g = explore(sim, b);
  CHECK(g.truncated());
  CHECK(g.max_depth_reached() <= 5);
}

TEST_CASE("lock-step exploration of the two-register mutex cycles") {
  RunConfig c = config(ProtocolKind::Mutex, 2, 2);
  c.perms = PermutationTable::rotations(2, 2, 1);
  Simulator sim(c);
  ExploreBounds b;
  b.lockstep = true;
  StateGraph g = explore(sim, b);
  CHECK_FALSE(g.truncated());
  for (std::uint32_t id = 0; id < g.size(); ++id) CHECK(g.out_edges(id).size() <= 1);
  auto w = detect_livelock_cycle(g);
  REQUIRE(w);
  CHECK(confirm_witness("livelock", *w));
}

TEST_CASE("minimize drops an idle suffix") {
  Simulator sim(config(ProtocolKind::Consensus, 2, 1, {3, 5}));
  auto decided_two = [&](const Trace& t) { return sim.decisions(t.final_state).size() == 2; };
  Trace t = run(sim, parse_schedule("S1 S2 S1 S2"));
  Trace small = minimize_trace(sim, t, decided_two);
  CHECK(small.schedule.size() == 4);

  auto p1_decided = [&](const Trace& t) { return sim.decision(t.final_state, 0).has_value(); };
  Trace padded = run(sim, parse_schedule("S1 S1 S2"));
  CHECK(format_schedule(minimize_trace(sim, padded, p1_decided).schedule) == "S1 S1");

  Trace already = run(sim, parse_schedule("S1 S1"));
  CHECK(minimize_trace(sim, already, p1_decided).schedule == already.schedule);

  CHECK_THROWS_AS(minimize_trace(sim, run(sim, parse_schedule("S2")), p1_decided),
                  std::invalid_argument);
}

TEST_CASE("minimized schedules are 1-minimal") {
  RunConfig c = config(ProtocolKind::Mutex, 2, 3);
  Simulator sim(c);
  auto in_cs = [&](const Trace& t) { return sim.in_critical_section(t.final_state) == 1; };
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Schedule s = random_schedule(sim, seed, 300, 0.0);
    // Cut at the first CS entry.
    Trace full = run(sim, s);
    std::size_t cut = 0;
    while (cut < full.steps.size() && full.steps[cut].outcome.kind != Outcome::EnteredCS) ++cut;
    REQUIRE(cut < full.steps.size());
    Trace t = run(sim, Schedule(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(cut) + 1));
    Trace small = minimize_trace(sim, t, in_cs);
    REQUIRE(in_cs(small));
    for (std::size_t i = 0; i < small.schedule.size(); ++i) {
      Schedule fewer = small.schedule;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
      bool still = false;
      try {
        still = in_cs(run(sim, fewer));
      } catch (const ScheduleError&) {
      }
      CHECK_FALSE(still);
    }
  }
}
