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

#include "anonmem/properties.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>
#include <unordered_map>

#include "anonmem/error.hpp"

namespace anonmem {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Verdict verdict(std::string property, Holds holds, std::size_t states, Clock::time_point t0,
                std::string detail = {}) {
  Verdict v;
  v.property = std::move(property);
  v.holds = holds;
  v.states = states;
  v.wall_ms = ms_since(t0);
  v.detail = std::move(detail);
  return v;
}

Witness path_witness(const StateGraph& graph, std::uint32_t id) {
  return Witness{graph.simulator().config(), graph.path_to(id), std::nullopt, std::nullopt,
                 graph.lockstep()};
}

void require(const StateGraph& graph, ProtocolKind kind, std::string_view property) {
  if (graph.simulator().config().protocol != kind) {
    throw ConfigError(std::string(property) + ": wrong protocol kind for this check");
  }
}

bool ladder_holds(const Simulator& sim, const GlobalState& g) {
  auto [top, holders] = sim.top_round(g);
  return top == 0 || holders <= sim.processes() - top + 1;
}

bool pending_acquire(const Simulator& sim, const GlobalState& g) {
  for (std::uint32_t p = 0; p < sim.processes(); ++p) {
    if (sim.status(g, p) == ProcessStatus::Active) return true;
  }
  return false;
}

// Nodes from which some node satisfying `target` is reachable. Unexpanded
// nodes are included: their futures are unknown.
std::vector<bool> can_reach(const StateGraph& graph, const std::vector<bool>& target) {
  const std::size_t n = graph.size();
  std::vector<std::vector<std::uint32_t>> preds(n);
  for (const auto& e : graph.edges()) preds[e.dst].push_back(e.src);
  std::vector<bool> good(n, false);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t id = 0; id < n; ++id) {
    if (target[id] || !graph.expanded(id)) {
      good[id] = true;
      stack.push_back(id);
    }
  }
  while (!stack.empty()) {
    std::uint32_t id = stack.back();
    stack.pop_back();
    for (auto p : preds[id]) {
      if (!good[p]) {
        good[p] = true;
        stack.push_back(p);
      }
    }
  }
  return good;
}

enum : std::uint8_t { White, Gray, Black };

// DFS from `from` for a cycle (optionally avoiding progress edges). Nodes
// already Black in `color` are known cycle-free and skipped. Returns (path
// from `from` to the cycle entry, the cycle).
std::optional<std::pair<Schedule, Schedule>> find_cycle(const StateGraph& graph,
                                                        std::uint32_t from,
                                                        std::vector<std::uint8_t>& color,
                                                        bool skip_progress_edges) {
  struct Frame {
    std::uint32_t node;
    std::size_t next = 0;
    std::uint32_t via = 0;  // edge used to enter node
  };
  std::vector<Frame> stack{{from, 0, 0}};
  color[from] = Gray;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& outs = graph.out_edges(f.node);
    if (f.next == outs.size()) {
      color[f.node] = Black;
      stack.pop_back();
      continue;
    }
    const Edge& e = graph.edges()[outs[f.next++]];
    if (skip_progress_edges && is_progress(e.outcome.kind)) continue;
    if (color[e.dst] == Gray) {
      // Back edge: the cycle is the stack segment from e.dst plus this edge.
      std::size_t pos = 0;
      while (stack[pos].node != e.dst) ++pos;
      Schedule prefix, cycle;
      for (std::size_t i = 1; i <= pos; ++i) prefix.push_back(graph.edges()[stack[i].via].label);
      for (std::size_t i = pos + 1; i < stack.size(); ++i) {
        cycle.push_back(graph.edges()[stack[i].via].label);
      }
      cycle.push_back(e.label);
      return std::make_pair(std::move(prefix), std::move(cycle));
    }
    if (color[e.dst] == White) {
      color[e.dst] = Gray;
      stack.push_back({e.dst, 0, outs[f.next - 1]});
    }
  }
  return std::nullopt;
}

Witness lasso(const StateGraph& graph, std::uint32_t anchor, const Schedule& to_cycle,
              const Schedule& cycle) {
  Witness w = path_witness(graph, anchor);
  w.stuck_at = w.schedule.size();
  w.schedule.insert(w.schedule.end(), to_cycle.begin(), to_cycle.end());
  w.cycle_start = w.schedule.size();
  w.schedule.insert(w.schedule.end(), cycle.begin(), cycle.end());
  return w;
}

std::size_t distinct(std::vector<std::uint64_t> values) {
  std::sort(values.begin(), values.end());
  return static_cast<std::size_t>(std::unique(values.begin(), values.end()) - values.begin());
}

}  // namespace

std::string_view to_string(Holds holds) {
  switch (holds) {
    case Holds::True: return "true";
    case Holds::False: return "false";
    case Holds::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string Verdict::record(std::string_view witness_path) const {
  std::ostringstream os;
  os << "property=" << property << " holds=" << to_string(holds) << " witness=" << witness_path
     << " states=" << states << " wall_ms=" << static_cast<long long>(wall_ms);
  return os.str();
}

bool is_progress(Outcome outcome) {
  return outcome != Outcome::Running && outcome != Outcome::ExitedCS;
}

// -- mutex -------------------------------------------------------------------

Verdict check_mutual_exclusion(const StateGraph& graph) {
  require(graph, ProtocolKind::Mutex, "mutual_exclusion");
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  for (std::uint32_t id = 0; id < graph.size(); ++id) {
    if (sim.in_critical_section(graph.state(id)) >= 2) {
      auto v = verdict("mutual_exclusion", Holds::False, graph.size(), t0,
                       "two processes in the critical section");
      v.witness = path_witness(graph, id);
      return v;
    }
  }
  return verdict("mutual_exclusion", Holds::True, graph.size(), t0);
}

Verdict check_mutual_exclusion(const Trace& trace) {
  if (trace.config.protocol != ProtocolKind::Mutex) {
    throw ConfigError("mutual_exclusion: wrong protocol kind for this check");
  }
  auto t0 = Clock::now();
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& st = trace.steps[i].statuses;
    if (std::count(st.begin(), st.end(), ProcessStatus::InCS) >= 2) {
      auto v = verdict("mutual_exclusion", Holds::False, i + 1, t0,
                       "two processes in the critical section");
      v.witness = Witness{trace.config, Schedule(trace.schedule.begin(), trace.schedule.begin() +
                                                     static_cast<std::ptrdiff_t>(i + 1)), {}, {}};
      return v;
    }
  }
  return verdict("mutual_exclusion", Holds::True, trace.steps.size(), t0);
}

Verdict check_ladder(const StateGraph& graph) {
  require(graph, ProtocolKind::Mutex, "ladder");
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  for (std::uint32_t id = 0; id < graph.size(); ++id) {
    if (!ladder_holds(sim, graph.state(id))) {
      auto v = verdict("ladder", Holds::False, graph.size(), t0,
                       "more than n - r + 1 processes at the highest round r");
      v.witness = path_witness(graph, id);
      return v;
    }
  }
  return verdict("ladder", Holds::True, graph.size(), t0);
}

Verdict check_ladder(const Trace& trace) {
  auto t0 = Clock::now();
  Simulator sim(trace.config);
  GlobalState g = sim.initial_state();
  for (std::size_t i = 0; i < trace.schedule.size(); ++i) {
    sim.apply(g, trace.schedule[i]);
    if (!ladder_holds(sim, g)) {
      auto v = verdict("ladder", Holds::False, i + 1, t0,
                       "more than n - r + 1 processes at the highest round r");
      v.witness = Witness{trace.config, Schedule(trace.schedule.begin(),
                                                 trace.schedule.begin() +
                                                     static_cast<std::ptrdiff_t>(i + 1)), {}, {}};
      return v;
    }
  }
  return verdict("ladder", Holds::True, trace.schedule.size(), t0);
}

Verdict check_ownership_partition(const StateGraph& graph) {
  require(graph, ProtocolKind::Mutex, "ownership_partition");
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  const auto& perms = sim.config().perms;
  std::vector<int> owner(sim.config().m);
  for (std::uint32_t id = 0; id < graph.size(); ++id) {
    GlobalState g = graph.state(id);
    std::fill(owner.begin(), owner.end(), -1);
    for (std::uint32_t p = 0; p < sim.processes(); ++p) {
      const auto& s = std::get<MutexState>(g.procs[p].local);
      for (std::size_t j = 0; j < s.myview.size(); ++j) {
        if (!s.myview[j]) continue;
        std::size_t global = perms[p](j);
        if (owner[global] >= 0) {
          auto v = verdict("ownership_partition", Holds::False, graph.size(), t0,
                           "register " + std::to_string(global + 1) + " owned by processes " +
                               std::to_string(owner[global] + 1) + " and " +
                               std::to_string(p + 1));
          v.witness = path_witness(graph, id);
          return v;
        }
        owner[global] = static_cast<int>(p);
      }
    }
  }
  return verdict("ownership_partition", Holds::True, graph.size(), t0);
}

Verdict check_deadlock_freedom(const StateGraph& graph) {
  require(graph, ProtocolKind::Mutex, "deadlock_freedom");
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  const std::size_t n = graph.size();
  std::vector<bool> target(n), pending(n);
  for (std::uint32_t id = 0; id < n; ++id) {
    GlobalState g = graph.state(id);
    pending[id] = pending_acquire(sim, g) && sim.in_critical_section(g) == 0;
    target[id] = sim.in_critical_section(g) > 0 || !pending_acquire(sim, g);
  }
  auto good = can_reach(graph, target);
  // BFS ids are depth-ordered, so the first bad node is a shallowest one.
  for (std::uint32_t id = 0; id < n; ++id) {
    if (!pending[id] || good[id]) continue;
    auto v = verdict("deadlock_freedom", Holds::False, n, t0,
                     "critical section unreachable with an acquire pending");
    // Everything reachable from a bad node is bad and expanded, and every
    // such node has a successor, so a cycle exists.
    std::vector<std::uint8_t> color(n, White);
    if (auto c = find_cycle(graph, id, color, false)) {
      v.witness = lasso(graph, id, c->first, c->second);
    } else {
      v.witness = path_witness(graph, id);
      v.witness->stuck_at = v.witness->schedule.size();
    }
    return v;
  }
  if (graph.truncated()) {
    return verdict("deadlock_freedom", Holds::Inconclusive, n, t0, "graph truncated");
  }
  return verdict("deadlock_freedom", Holds::True, n, t0);
}

Verdict check_round_progress(const StateGraph& graph) {
  require(graph, ProtocolKind::Mutex, "round_progress");
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  const std::size_t n = graph.size();
  const auto nproc = static_cast<std::uint32_t>(sim.processes());
  std::vector<std::uint32_t> top(n), best(n);
  std::vector<bool> in_cs(n);
  for (std::uint32_t id = 0; id < n; ++id) {
    GlobalState g = graph.state(id);
    top[id] = sim.top_round(g).first;
    in_cs[id] = sim.in_critical_section(g) > 0;
    std::uint32_t b = 0;
    for (const auto& slot : g.procs) b = std::max(b, std::get<MutexState>(slot.local).round);
    best[id] = b;
  }
  for (std::uint32_t r = 1; r < nproc; ++r) {
    std::vector<bool> target(n);
    for (std::uint32_t id = 0; id < n; ++id) target[id] = in_cs[id] || best[id] >= r + 1;
    auto good = can_reach(graph, target);
    for (std::uint32_t id = 0; id < n; ++id) {
      if (top[id] != r || in_cs[id] || good[id]) continue;
      auto v = verdict("round_progress", Holds::False, n, t0,
                       "no process can get past round " + std::to_string(r));
      v.witness = path_witness(graph, id);
      return v;
    }
  }
  if (graph.truncated()) {
    return verdict("round_progress", Holds::Inconclusive, n, t0, "graph truncated");
  }
  return verdict("round_progress", Holds::True, n, t0);
}

std::optional<Witness> detect_livelock_cycle(const StateGraph& graph) {
  const Simulator& sim = graph.simulator();
  const std::size_t n = graph.size();
  const auto nproc = static_cast<std::uint32_t>(sim.processes());
  auto internal = [&](const Edge& e) { return !is_progress(e.outcome.kind); };

  // Tarjan over the progress-free subgraph, iterative.
  std::vector<std::uint32_t> index(n, UINT32_MAX), low(n), comp(n, UINT32_MAX), stack;
  std::vector<bool> on_stack(n);
  std::uint32_t counter = 0, comps = 0;
  struct Frame {
    std::uint32_t node;
    std::size_t next;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != UINT32_MAX) continue;
    std::vector<Frame> dfs{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!dfs.empty()) {
      Frame& f = dfs.back();
      const auto& outs = graph.out_edges(f.node);
      if (f.next < outs.size()) {
        const Edge& e = graph.edges()[outs[f.next++]];
        if (!internal(e)) continue;
        if (index[e.dst] == UINT32_MAX) {
          index[e.dst] = low[e.dst] = counter++;
          stack.push_back(e.dst);
          on_stack[e.dst] = true;
          dfs.push_back({e.dst, 0});
        } else if (on_stack[e.dst]) {
          low[f.node] = std::min(low[f.node], index[e.dst]);
        }
        continue;
      }
      std::uint32_t v = f.node;
      dfs.pop_back();
      if (!dfs.empty()) low[dfs.back().node] = std::min(low[dfs.back().node], low[v]);
      if (low[v] != index[v]) continue;
      std::uint32_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = comps;
      } while (w != v);
      ++comps;
    }
  }

  // A component holds a weakly fair cycle iff it has an internal edge and
  // every process either steps inside it or is disabled somewhere in it.
  std::vector<std::vector<std::uint32_t>> members(comps);
  for (std::uint32_t id = 0; id < n; ++id) members[comp[id]].push_back(id);
  for (std::uint32_t c = 0; c < comps; ++c) {
    const auto& nodes = members[c];
    std::vector<std::optional<std::uint32_t>> step_edge(nproc), idle_node(nproc);
    bool has_edge = false;
    for (auto id : nodes) {
      if (!graph.expanded(id)) continue;
      GlobalState g = graph.state(id);
      for (std::uint32_t p = 0; p < nproc; ++p) {
        if (!sim.enabled(g, p) && !idle_node[p]) idle_node[p] = id;
      }
      for (auto ei : graph.out_edges(id)) {
        const Edge& e = graph.edges()[ei];
        if (!internal(e) || comp[e.dst] != c) continue;
        has_edge = true;
        if (!step_edge[e.label.pid]) step_edge[e.label.pid] = ei;
      }
    }
    if (!has_edge) continue;
    bool fair = true;
    for (std::uint32_t p = 0; p < nproc; ++p) fair = fair && (step_edge[p] || idle_node[p]);
    if (!fair) continue;

    // Closed walk from the first member through every required edge/node.
    auto route = [&](std::uint32_t from, std::uint32_t to, Schedule& out) {
      if (from == to) return;
      std::unordered_map<std::uint32_t, std::uint32_t> via;  // node -> edge
      std::vector<std::uint32_t> queue{from};
      via[from] = UINT32_MAX;
      for (std::size_t i = 0; i < queue.size() && !via.count(to); ++i) {
        for (auto ei : graph.out_edges(queue[i])) {
          const Edge& e = graph.edges()[ei];
          if (!internal(e) || comp[e.dst] != c || via.count(e.dst)) continue;
          via[e.dst] = ei;
          queue.push_back(e.dst);
        }
      }
      Schedule rev;
      for (std::uint32_t x = to; x != from; x = graph.edges()[via[x]].src) {
        rev.push_back(graph.edges()[via[x]].label);
      }
      out.insert(out.end(), rev.rbegin(), rev.rend());
    };
    const std::uint32_t start = nodes.front();
    std::uint32_t at = start;
    Schedule cycle;
    for (std::uint32_t p = 0; p < nproc; ++p) {
      if (step_edge[p]) {
        const Edge& e = graph.edges()[*step_edge[p]];
        route(at, e.src, cycle);
        cycle.push_back(e.label);
        at = e.dst;
      } else {
        route(at, *idle_node[p], cycle);
        at = *idle_node[p];
      }
    }
    route(at, start, cycle);
    Witness w = path_witness(graph, start);
    w.lockstep = graph.lockstep();
    w.cycle_start = w.schedule.size();
    w.schedule.insert(w.schedule.end(), cycle.begin(), cycle.end());
    return w;
  }
  return std::nullopt;
}

namespace {

// Every process enabled throughout keys[from..to] steps in schedule[from, to).
bool weakly_fair(const Simulator& sim, const std::vector<GlobalState>& states,
                 const Schedule& schedule, std::size_t from, std::size_t to) {
  for (std::uint32_t p = 0; p < sim.processes(); ++p) {
    bool always = true, stepped = false;
    for (std::size_t i = from; i <= to && always; ++i) always = sim.enabled(states[i], p);
    for (std::size_t i = from; i < to && !stepped; ++i) stepped = schedule[i].pid == p;
    if (always && !stepped) return false;
  }
  return true;
}

}  // namespace

std::optional<Witness> detect_livelock_cycle(const Simulator& sim, const Schedule& schedule) {
  GlobalState g = sim.initial_state();
  std::vector<GlobalState> states{g};
  Schedule done;  // executed directives
  std::unordered_map<std::string, std::size_t> seen;  // key -> first index after which it held
  seen.emplace(sim.encode(g), 0);
  for (const auto& d : schedule) {
    if (d.kind == Directive::Kind::Step && !sim.enabled(g, d.pid)) continue;
    StepOutcome out = sim.apply(g, d);
    done.push_back(d);
    states.push_back(g);
    if (is_progress(out.kind)) {
      seen.clear();  // cycles may not span progress
    }
    auto [it, fresh] = seen.try_emplace(sim.encode(g), done.size());
    if (!fresh && weakly_fair(sim, states, done, it->second, done.size())) {
      Witness w{sim.config(), done, {}, {}};
      w.cycle_start = it->second;
      return w;
    }
  }
  return std::nullopt;
}

// -- agreement ---------------------------------------------------------------

Verdict check_agreement(const std::vector<std::uint64_t>& decisions, std::size_t k) {
  if (k < 1) throw ConfigError("k: must be >= 1");
  auto t0 = Clock::now();
  std::size_t d = distinct(decisions);
  return verdict("agreement", d <= k ? Holds::True : Holds::False, 1, t0,
                 std::to_string(d) + " distinct decided values, limit " + std::to_string(k));
}

Verdict check_validity(const std::vector<std::uint64_t>& decisions,
                       const std::vector<std::uint64_t>& inputs) {
  auto t0 = Clock::now();
  for (auto d : decisions) {
    if (std::find(inputs.begin(), inputs.end(), d) == inputs.end()) {
      return verdict("validity", Holds::False, 1, t0,
                     "decided " + std::to_string(d) + " which nobody proposed");
    }
  }
  return verdict("validity", Holds::True, 1, t0);
}

Verdict check_agreement(const StateGraph& graph, std::size_t k) {
  if (k < 1) throw ConfigError("k: must be >= 1");
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  for (std::uint32_t id = 0; id < graph.size(); ++id) {
    if (distinct(sim.decisions(graph.state(id))) > k) {
      auto v = verdict("agreement", Holds::False, graph.size(), t0,
                       "more than " + std::to_string(k) + " distinct decided values");
      v.witness = path_witness(graph, id);
      return v;
    }
  }
  return verdict("agreement", Holds::True, graph.size(), t0);
}

Verdict check_validity(const StateGraph& graph) {
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  const auto& inputs = sim.config().inputs;
  for (std::uint32_t id = 0; id < graph.size(); ++id) {
    auto v = check_validity(sim.decisions(graph.state(id)), inputs);
    if (!v.ok()) {
      v.witness = path_witness(graph, id);
      v.states = graph.size();
      v.wall_ms = ms_since(t0);
      return v;
    }
  }
  return verdict("validity", Holds::True, graph.size(), t0);
}

Verdict check_wait_freedom_bound(const Trace& trace, std::size_t bound) {
  auto t0 = Clock::now();
  if (trace.config.protocol == ProtocolKind::Mutex) {
    throw ConfigError("wait_freedom: needs an agreement-protocol trace");
  }
  Simulator sim(trace.config);
  bool incomplete = false;
  for (std::uint32_t p = 0; p < sim.processes(); ++p) {
    if (trace.final_state.procs[p].crashed) continue;
    std::size_t used = trace.accesses_by(p);
    bool decided = sim.decision(trace.final_state, p).has_value();
    if (used > bound || (!decided && used >= bound)) {
      auto v = verdict("wait_freedom", Holds::False, trace.steps.size(), t0,
                       "process " + std::to_string(p + 1) + " used " + std::to_string(used) +
                           " accesses" + (decided ? " before deciding" : " without deciding") +
                           ", bound " + std::to_string(bound));
      v.witness = Witness{trace.config, trace.schedule, {}, {}};
      return v;
    }
    if (!decided) incomplete = true;
  }
  if (incomplete) {
    return verdict("wait_freedom", Holds::Inconclusive, trace.steps.size(), t0,
                   "trace ends before every live process decided");
  }
  return verdict("wait_freedom", Holds::True, trace.steps.size(), t0);
}

Verdict check_obstruction_freedom(const StateGraph& graph, std::size_t budget) {
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  for (std::uint32_t id = 0; id < graph.size(); ++id) {
    GlobalState g = graph.state(id);
    for (std::uint32_t p = 0; p < sim.processes(); ++p) {
      if (sim.status(g, p) != ProcessStatus::Active) continue;
      SoloResult r = solo_extension(sim, g, p, budget);
      if (!r.progressed()) {
        auto v = verdict("obstruction_freedom", Holds::False, graph.size(), t0,
                         "process " + std::to_string(p + 1) + " running alone did not decide in " +
                             std::to_string(budget) + " steps");
        Witness w = path_witness(graph, id);
        w.schedule.insert(w.schedule.end(), budget, Directive::step(p));
        v.witness = std::move(w);
        return v;
      }
    }
  }
  if (graph.truncated()) {
    return verdict("obstruction_freedom", Holds::Inconclusive, graph.size(), t0,
                   "every explored state passed, graph truncated");
  }
  return verdict("obstruction_freedom", Holds::True, graph.size(), t0);
}

// -- witness replay ----------------------------------------------------------

bool confirm_witness(std::string_view property, const Witness& witness, std::size_t k) {
  Simulator sim(witness.config);
  GlobalState g = sim.initial_state();
  std::vector<std::string> keys{sim.encode(g)};
  std::vector<GlobalState> states{g};
  std::vector<StepOutcome> outcomes;
  try {
    for (const auto& d : witness.schedule) {
      outcomes.push_back(sim.apply(g, d));
      keys.push_back(sim.encode(g));
      states.push_back(g);
    }
  } catch (const ScheduleError&) {
    return false;
  }

  if (witness.cycle_start) {
    std::size_t c = *witness.cycle_start;
    if (c >= witness.schedule.size() || keys[c] != keys.back()) return false;
    for (std::size_t i = c; i < outcomes.size(); ++i) {
      if (is_progress(outcomes[i].kind)) return false;
    }
  }

  if (property == "mutual_exclusion") return sim.in_critical_section(g) >= 2;
  if (property == "ladder") return !ladder_holds(sim, g);
  if (property == "agreement") return distinct(sim.decisions(g)) > k;
  if (property == "validity") return !check_validity(sim.decisions(g), sim.config().inputs).ok();
  if (property == "livelock") {
    if (!witness.cycle_start) return false;
    return weakly_fair(sim, states, witness.schedule, *witness.cycle_start,
                       witness.schedule.size());
  }
  if (property == "deadlock_freedom") {
    if (!witness.stuck_at) return false;
    std::size_t s = *witness.stuck_at;
    GlobalState stuck = sim.decode(keys[s]);
    if (!pending_acquire(sim, stuck) || sim.in_critical_section(stuck) > 0) return false;
    ExploreBounds b;
    b.lockstep = witness.lockstep;
    b.max_states = 1'000'000;
    Schedule prefix(witness.schedule.begin(), witness.schedule.begin() + static_cast<std::ptrdiff_t>(s));
    StateGraph closure = explore(sim, b, stuck, prefix);
    if (closure.truncated()) return false;
    for (std::uint32_t id = 0; id < closure.size(); ++id) {
      GlobalState x = closure.state(id);
      if (sim.in_critical_section(x) > 0 || !pending_acquire(sim, x)) return false;
    }
    return true;
  }
  if (property == "obstruction_freedom") {
    // The schedule ends with the solo run; the soloist must still be active.
    if (witness.schedule.empty()) return false;
    std::uint32_t p = witness.schedule.back().pid;
    return sim.status(g, p) == ProcessStatus::Active;
  }
  if (property == "wait_freedom") return true;  // checked by the caller against its bound
  return false;
}

}  // namespace anonmem

namespace anonmem {

Verdict check_termination(const StateGraph& graph) {
  require(graph, ProtocolKind::Mutex, "termination");
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  const std::size_t n = graph.size();
  std::vector<bool> finished(n);
  for (std::uint32_t id = 0; id < n; ++id) {
    GlobalState g = graph.state(id);
    bool all = true;
    for (std::uint32_t p = 0; p < sim.processes(); ++p) {
      auto st = sim.status(g, p);
      all = all && (st == ProcessStatus::Done || st == ProcessStatus::Aborted);
    }
    finished[id] = all;
  }
  auto good = can_reach(graph, finished);
  for (std::uint32_t id = 0; id < n; ++id) {
    if (good[id]) continue;
    auto v = verdict("termination", Holds::False, n, t0,
                     "an acquire can no longer finish with Done or Aborted");
    v.witness = path_witness(graph, id);
    v.witness->stuck_at = v.witness->schedule.size();
    return v;
  }
  if (graph.truncated()) {
    return verdict("termination", Holds::Inconclusive, n, t0, "graph truncated");
  }
  return verdict("termination", Holds::True, n, t0);
}

Verdict check_wait_freedom_bound(const StateGraph& graph, std::size_t bound) {
  auto t0 = Clock::now();
  const Simulator& sim = graph.simulator();
  if (sim.config().protocol == ProtocolKind::Mutex) {
    throw ConfigError("wait_freedom: needs an agreement-protocol graph");
  }
  std::size_t longest = 0;
  for (const auto& e : graph.edges()) {
    if (e.outcome.kind != Outcome::Decided) continue;
    Trace t = run(sim, graph.path_to(e.dst));
    std::size_t used = t.accesses_by(e.label.pid);
    longest = std::max(longest, used);
    if (used > bound) {
      auto v = verdict("wait_freedom", Holds::False, graph.size(), t0,
                       "process " + std::to_string(e.label.pid + 1) + " decided after " +
                           std::to_string(used) + " accesses, bound " + std::to_string(bound));
      v.witness = Witness{sim.config(), t.schedule, {}, {}};
      return v;
    }
  }
  // Live processes that are still undecided must also be within bound.
  for (std::uint32_t id = 0; id < graph.size(); ++id) {
    if (!graph.terminal(id)) continue;
    Trace t = run(sim, graph.path_to(id));
    auto v = check_wait_freedom_bound(t, bound);
    if (v.holds == Holds::False) {
      v.states = graph.size();
      return v;
    }
  }
  std::string detail = "longest decision " + std::to_string(longest) + " accesses";
  if (graph.truncated()) {
    return verdict("wait_freedom", Holds::Inconclusive, graph.size(), t0,
                   detail + ", graph truncated");
  }
  return verdict("wait_freedom", Holds::True, graph.size(), t0, detail);
}

Verdict probe_deadlock_freedom(const RunConfig& config, const ProbeOptions& options) {
  auto t0 = Clock::now();
  RunConfig cfg = config;
  cfg.validate();
  if (cfg.protocol != ProtocolKind::Mutex) {
    throw ConfigError("deadlock_freedom: wrong protocol kind for this check");
  }
  Simulator sim(cfg);
  const auto nproc = static_cast<std::uint32_t>(sim.processes());
  // A stall: no register changed for this many steps, CS empty.
  const std::size_t stall = 8 * cfg.n * cfg.m;
  std::mt19937_64 rng(options.seed);
  std::size_t states = 0, probes = 0;

  auto probe = [&](const GlobalState& g, const Schedule& prefix) -> std::optional<Verdict> {
    ++probes;
    ExploreBounds b;
    b.max_states = options.closure_states;
    StateGraph closure = explore(sim, b, g, prefix);
    states += closure.size();
    Verdict v = check_deadlock_freedom(closure);
    if (v.holds == Holds::False) return v;
    return std::nullopt;
  };

  for (std::uint64_t w = 0; w < options.walks; ++w) {
    GlobalState g = sim.initial_state();
    Schedule s;
    std::size_t quiet = 0;
    bool probed = false;
    while (s.size() < options.walk_length) {
      std::vector<std::uint32_t> live;
      for (std::uint32_t p = 0; p < nproc; ++p) {
        if (sim.enabled(g, p)) live.push_back(p);
      }
      if (live.empty()) break;
      auto pid = live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng)];
      auto before = g.memory;
      s.push_back(Directive::step(pid));
      sim.apply(g, s.back());
      quiet = (g.memory == before) ? quiet + 1 : 0;
      if (quiet >= stall && !probed && sim.in_critical_section(g) == 0) {
        probed = true;  // one probe per walk keeps the cost bounded
        if (auto v = probe(g, s)) {
          v->states = states;
          v->wall_ms = ms_since(t0);
          v->detail += " (walk " + std::to_string(w) + ", " + std::to_string(probes) + " probes)";
          return *v;
        }
      }
    }
  }
  return verdict("deadlock_freedom", Holds::Inconclusive, states, t0,
                 "no stuck state found: walks=" + std::to_string(options.walks) +
                     " probes=" + std::to_string(probes));
}

}  // namespace anonmem
