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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anonmem/explorer.hpp"
#include "anonmem/simulator.hpp"

namespace anonmem {

enum class Holds : std::uint8_t { True, False, Inconclusive };

std::string_view to_string(Holds holds);

/// A re-runnable counterexample: the configuration it runs under (with its
/// permutation table) and a schedule from the initial state.
struct Witness {
  RunConfig config;
  Schedule schedule;
  /// Lasso: the state after schedule[0, cycle_start) equals the final state
  /// and no directive in the cycle makes progress.
  std::optional<std::size_t> cycle_start;
  /// Deadlock: after schedule[0, stuck_at) the critical section is no
  /// longer reachable (checked by exploring that state's closure).
  std::optional<std::size_t> stuck_at;
  /// The closure above is taken under lock-step scheduling.
  bool lockstep = false;
};

struct Verdict {
  std::string property;
  Holds holds = Holds::Inconclusive;
  std::optional<Witness> witness;
  std::size_t states = 0;
  double wall_ms = 0.0;
  std::string detail;

  bool ok() const { return holds == Holds::True; }
  /// `property=... holds=... witness=... states=... wall_ms=...`
  std::string record(std::string_view witness_path = "-") const;
};

/// An outcome that resolves a pending operation: CS entry, decision,
/// abort, or completion.
bool is_progress(Outcome outcome);

// -- mutex -------------------------------------------------------------------

Verdict check_mutual_exclusion(const StateGraph& graph);
Verdict check_mutual_exclusion(const Trace& trace);

/// If r >= 1 is the highest round held, at most n - r + 1 processes hold it.
Verdict check_ladder(const StateGraph& graph);
Verdict check_ladder(const Trace& trace);

/// No global register is marked owned by two processes.
Verdict check_ownership_partition(const StateGraph& graph);

/// From every state with a pending acquire and an empty critical section, a
/// state with a process in CS (or with no pending acquire left, for aborts)
/// is reachable. Unexpanded nodes count as possibly good, so a False
/// verdict is sound even on truncated graphs; True needs a closed graph.
Verdict check_deadlock_freedom(const StateGraph& graph);

/// From every state whose highest round r is below n, a state with some
/// process at round r + 1 or in CS is reachable.
Verdict check_round_progress(const StateGraph& graph);

/// Sampled progress check for instances too large to exhaust: random
/// schedules are run, and wherever one stalls (memory unchanged for a while
/// with nobody in CS) the closure of that state is explored up to
/// `closure_states` and checked as above. False comes with a lasso witness;
/// otherwise the verdict is Inconclusive.
struct ProbeOptions {
  std::uint64_t walks = 200;
  std::size_t walk_length = 20'000;
  std::uint64_t seed = 1;
  std::size_t closure_states = 20'000;
};
Verdict probe_deadlock_freedom(const RunConfig& config, const ProbeOptions& options);

/// Every acquire invocation finishes: from every explored state a state
/// where all processes are Done or Aborted is reachable, and no dead end
/// leaves a process waiting.
Verdict check_termination(const StateGraph& graph);

/// A cycle with no progress edge in which every process either steps or
/// is disabled at some point (weak fairness, so one process spinning while
/// another could move does not count), with a path to it.
std::optional<Witness> detect_livelock_cycle(const StateGraph& graph);
/// A repeated state along the trace with no progress in between, under the
/// same fairness condition. Steps of finished processes are skipped, so a
/// plain lock-step schedule can be passed as is.
std::optional<Witness> detect_livelock_cycle(const Simulator& sim, const Schedule& schedule);

// -- agreement ---------------------------------------------------------------

/// At most k distinct decided values.
Verdict check_agreement(const std::vector<std::uint64_t>& decisions, std::size_t k);
/// Every decided value is some input.
Verdict check_validity(const std::vector<std::uint64_t>& decisions,
                       const std::vector<std::uint64_t>& inputs);

/// Agreement and validity over every explored state (decisions are
/// absorbing, so partially decided states count too).
Verdict check_agreement(const StateGraph& graph, std::size_t k);
Verdict check_validity(const StateGraph& graph);

/// Every non-crashed process decides within `bound` of its own accesses.
Verdict check_wait_freedom_bound(const Trace& trace, std::size_t bound);

/// Graph form: every process that decides along an explored edge has used
/// at most `bound` accesses of its own on the way there.
Verdict check_wait_freedom_bound(const StateGraph& graph, std::size_t bound);

/// Every active process of every explored state decides when run solo for
/// `budget` steps. Inconclusive (at best) on truncated graphs.
Verdict check_obstruction_freedom(const StateGraph& graph, std::size_t budget);

struct HuntOptions {
  std::uint64_t walks = 200'000;     // random walks; 0 with bfs_states 0 is an empty budget
  std::size_t walk_length = 600;
  std::size_t bfs_states = 0;        // states for a breadth-first sweep
  std::uint64_t seed = 1;
  bool randomize_perms = true;       // fresh seeded table per walk
  std::size_t k = 1;                 // agreement target
  /// When a walk produces its first decision and another live process
  /// still prefers a different value, the closure of that state is explored
  /// up to this many states (0 turns this off).
  std::size_t closure_states = 0;
};

/// Looks for a run of the set-agreement protocol in which more than k
/// values are decided, using swarm-style random walks that also pick write
/// targets adversarially, then an optional breadth-first sweep. A hit is
/// minimized and replay-checked before it is returned.
Verdict hunt_agreement_violation(const RunConfig& config, const HuntOptions& options);

/// Re-runs a witness and checks it still shows a violation of `property`.
bool confirm_witness(std::string_view property, const Witness& witness, std::size_t k = 1);

}  // namespace anonmem
