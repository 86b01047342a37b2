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

#include <algorithm>
#include <chrono>
#include <random>
#include <sstream>

#include "anonmem/error.hpp"
#include "anonmem/minimize.hpp"
#include "anonmem/properties.hpp"

namespace anonmem {

namespace {

std::size_t distinct_decisions(const Simulator& sim, const GlobalState& g) {
  auto d = sim.decisions(g);
  std::sort(d.begin(), d.end());
  return static_cast<std::size_t>(std::unique(d.begin(), d.end()) - d.begin());
}

// Explores the closure of a state just after its first decision when some
// live process still prefers another value.
std::optional<Schedule> probe_closure(const Simulator& sim, const GlobalState& g,
                                      const Schedule& prefix, const HuntOptions& options,
                                      std::size_t& states) {
  auto decided = sim.decisions(g);
  bool contested = false;
  for (std::uint32_t p = 0; p < sim.processes(); ++p) {
    if (!sim.enabled(g, p)) continue;
    const auto& s = std::get<SetAgreementState>(g.procs[p].local);
    if (std::find(decided.begin(), decided.end(), s.preference) == decided.end()) contested = true;
  }
  if (!contested) return std::nullopt;
  ExploreBounds b;
  b.max_states = options.closure_states;
  b.branch_on_choice = true;
  StateGraph closure = explore(sim, b, g, prefix);
  states += closure.size();
  Verdict v = check_agreement(closure, options.k);
  if (v.holds == Holds::False) return v.witness->schedule;
  return std::nullopt;
}

// One swarm walk: random per-process weights, bursts of solo steps, random
// write targets. Returns a schedule ending with more than k values decided.
std::optional<Schedule> walk(const Simulator& sim, std::mt19937_64& rng,
                             const HuntOptions& options, std::size_t& steps,
                             std::size_t& probe_states) {
  const std::size_t length = options.walk_length;
  const std::size_t k = options.k;
  const auto n = static_cast<std::uint32_t>(sim.processes());
  const std::size_t m = sim.config().m;
  std::vector<double> weight(n);
  for (auto& w : weight) w = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  // Long bursts let a process finish a full collect uninterrupted; short
  // ones produce stale views.
  const std::size_t max_burst = std::uniform_int_distribution<std::size_t>(1, 3 * m)(rng);

  GlobalState g = sim.initial_state();
  Schedule s;
  std::vector<double> live(n);
  while (s.size() < length) {
    for (std::uint32_t p = 0; p < n; ++p) live[p] = sim.enabled(g, p) ? weight[p] : 0.0;
    if (std::all_of(live.begin(), live.end(), [](double w) { return w == 0.0; })) break;
    auto pid = static_cast<std::uint32_t>(
        std::discrete_distribution<std::uint32_t>(live.begin(), live.end())(rng));
    std::size_t burst = std::uniform_int_distribution<std::size_t>(1, max_burst)(rng);
    for (std::size_t b = 0; b < burst && s.size() < length && sim.enabled(g, pid); ++b) {
      Directive d = Directive::step(pid);
      auto targets = sim.choice_options(g, pid);
      if (!targets.empty()) {
        d.choice = targets[std::uniform_int_distribution<std::size_t>(0, targets.size() - 1)(rng)];
      }
      StepOutcome out = sim.apply(g, d);
      s.push_back(d);
      ++steps;
      if (out.kind != Outcome::Decided) continue;
      std::size_t distinct = distinct_decisions(sim, g);
      if (distinct > k) return s;
      if (distinct == k && options.closure_states > 0) {
        if (auto hit = probe_closure(sim, g, s, options, probe_states)) return hit;
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

Verdict hunt_agreement_violation(const RunConfig& config, const HuntOptions& options) {
  auto t0 = std::chrono::steady_clock::now();
  if (config.protocol != ProtocolKind::SetAgreement) {
    throw ConfigError("protocol: the hunt targets set agreement");
  }
  RunConfig base = config;
  base.validate();

  Verdict v;
  v.property = "agreement";
  std::size_t steps = 0, probe_states = 0;
  std::uint64_t walks_done = 0;
  std::mt19937_64 rng(options.seed);

  auto finish = [&](std::optional<Witness> w, std::size_t states, std::string how) {
    v.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    v.states = states;
    std::ostringstream os;
    os << how << " walks=" << walks_done << " walk_steps=" << steps
       << " probe_states=" << probe_states << " bfs_states=" << options.bfs_states
       << " seed=" << options.seed;
    v.detail = os.str();
    v.holds = w ? Holds::False : Holds::Inconclusive;
    v.witness = std::move(w);
    return v;
  };

  auto shrink = [&](RunConfig cfg, const Schedule& s) -> std::optional<Witness> {
    Simulator sim(cfg);
    auto pred = [&](const Trace& t) { return distinct_decisions(sim, t.final_state) > options.k; };
    Trace min = minimize_trace(sim, run(sim, s), pred);
    Witness w{cfg, min.schedule, {}, {}};
    if (!confirm_witness("agreement", w, options.k)) return std::nullopt;
    return w;
  };

  for (; walks_done < options.walks; ++walks_done) {
    RunConfig cfg = base;
    if (options.randomize_perms) cfg.perms = PermutationTable::seeded(cfg.n, cfg.m, rng());
    Simulator sim(cfg);
    if (auto s = walk(sim, rng, options, steps, probe_states)) {
      ++walks_done;
      if (auto w = shrink(cfg, *s)) return finish(std::move(w), steps + probe_states, "found");
    }
  }

  std::size_t states = steps + probe_states;
  if (options.bfs_states > 0) {
    Simulator sim(base);
    ExploreBounds b;
    b.max_states = options.bfs_states;
    b.branch_on_choice = true;
    StateGraph graph = explore(sim, b);
    states += graph.size();
    Verdict a = check_agreement(graph, options.k);
    if (!a.ok() && a.witness) {
      if (auto w = shrink(base, a.witness->schedule)) return finish(std::move(w), states, "found");
    }
  }
  return finish(std::nullopt, states, "exhausted");
}

}  // namespace anonmem
