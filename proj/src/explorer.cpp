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

#include "anonmem/explorer.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace anonmem {

namespace {
constexpr std::uint32_t kNoEdge = std::numeric_limits<std::uint32_t>::max();
}

std::uint32_t StateGraph::intern(std::string key, std::uint32_t turn, std::size_t depth,
                                 bool& fresh) {
  if (lockstep_) key.push_back(static_cast<char>(turn));
  auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(keys_.size()));
  fresh = inserted;
  if (inserted) {
    if (lockstep_) key.pop_back();
    keys_.push_back(std::move(key));
    depth_.push_back(static_cast<std::uint32_t>(depth));
    turn_.push_back(turn);
    expanded_.push_back(false);
    parent_edge_.push_back(kNoEdge);
    out_.emplace_back();
    max_depth_reached_ = std::max(max_depth_reached_, depth);
  }
  return it->second;
}

Schedule StateGraph::path_to(std::uint32_t id) const {
  Schedule path;
  while (parent_edge_[id] != kNoEdge) {
    const Edge& e = edges_[parent_edge_[id]];
    path.push_back(e.label);
    id = e.src;
  }
  std::reverse(path.begin(), path.end());
  path.insert(path.begin(), root_prefix_.begin(), root_prefix_.end());
  return path;
}

std::string StateGraph::summary() const {
  std::ostringstream os;
  std::size_t terminals = 0;
  for (std::uint32_t id = 0; id < size(); ++id) terminals += terminal(id) ? 1 : 0;
  os << "states=" << size() << " edges=" << edges_.size() << " terminal=" << terminals
     << " depth=" << max_depth_reached_ << " truncated=" << (truncated_ ? "true" : "false");
  return os.str();
}

std::string StateGraph::edge_dump() const {
  std::ostringstream os;
  for (const auto& e : edges_) {
    os << e.src << ' ' << e.dst << ' ' << e.label.to_string() << ' ' << to_string(e.outcome.kind);
    if (e.outcome.kind == Outcome::Decided) os << '(' << e.outcome.value << ')';
    os << '\n';
  }
  return os.str();
}

StateGraph explore(const Simulator& sim, const ExploreBounds& bounds,
                   std::optional<GlobalState> root, Schedule root_prefix) {
  StateGraph graph(sim);
  graph.lockstep_ = bounds.lockstep;
  graph.root_prefix_ = std::move(root_prefix);
  const auto n = static_cast<std::uint32_t>(sim.processes());

  GlobalState start = root ? std::move(*root) : sim.initial_state();
  bool fresh = false;
  std::uint32_t start_turn = 0;
  if (bounds.lockstep && !graph.root_prefix_.empty()) {
    start_turn = (graph.root_prefix_.back().pid + 1) % n;
  }
  graph.intern(sim.encode(start), start_turn, 0, fresh);

  std::deque<std::uint32_t> frontier{0};
  std::vector<Directive> moves;
  while (!frontier.empty()) {
    std::uint32_t id = frontier.front();
    frontier.pop_front();
    if (graph.depth_[id] >= bounds.max_depth) {
      graph.truncated_ = true;
      continue;
    }
    const GlobalState g = graph.state(id);
    moves.clear();
    std::uint32_t next_turn = 0;
    if (bounds.lockstep) {
      for (std::uint32_t k = 0; k < n; ++k) {
        std::uint32_t p = (graph.turn_[id] + k) % n;
        if (sim.enabled(g, p)) {
          moves.push_back(Directive::step(p));
          next_turn = (p + 1) % n;
          break;
        }
      }
    } else {
      for (std::uint32_t p = 0; p < n; ++p) {
        if (!sim.enabled(g, p)) continue;
        auto options = bounds.branch_on_choice ? sim.choice_options(g, p)
                                               : std::vector<std::uint32_t>{};
        if (options.size() > 1) {
          for (auto k : options) moves.push_back(Directive::step(p, k));
        } else {
          moves.push_back(Directive::step(p));
        }
        if (bounds.branch_on_crashes && sim.config().crashes_allowed()) {
          moves.push_back(Directive::crash(p));
        }
      }
    }

    // Reserve room for every child before committing to the expansion.
    if (graph.size() + moves.size() > bounds.max_states) {
      graph.truncated_ = true;
      continue;
    }
    graph.expanded_[id] = true;
    for (const auto& d : moves) {
      GlobalState next = g;
      StepOutcome out = sim.apply(next, d);
      std::size_t child_depth =
          graph.depth_[id] + (d.kind == Directive::Kind::Step ? 1 : 0);
      std::uint32_t child = graph.intern(sim.encode(next), next_turn, child_depth, fresh);
      auto eid = static_cast<std::uint32_t>(graph.edges_.size());
      graph.edges_.push_back(Edge{id, child, d, out});
      graph.out_[id].push_back(eid);
      if (fresh) {
        graph.parent_edge_[child] = eid;
        frontier.push_back(child);
      }
    }
  }
  return graph;
}

}  // namespace anonmem
