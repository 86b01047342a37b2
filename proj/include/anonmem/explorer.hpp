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
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "anonmem/simulator.hpp"

namespace anonmem {

struct ExploreBounds {
  std::size_t max_states = 2'000'000;
  std::size_t max_depth = std::numeric_limits<std::size_t>::max();  // shared accesses
  bool branch_on_crashes = false;
  bool branch_on_choice = false;
  /// Only the round-robin successor p_1, p_2, ..., skipping disabled
  /// processes. The turn becomes part of the node.
  bool lockstep = false;
};

struct Edge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  Directive label;
  StepOutcome outcome;
};

/// Deduplicated reachable-state graph. Nodes hold the canonical state
/// encoding; dedup compares full encodings, so equal ids mean equal states.
class StateGraph {
 public:
  explicit StateGraph(const Simulator& sim) : sim_(&sim) {}

  const Simulator& simulator() const { return *sim_; }

  std::size_t size() const { return keys_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint32_t root() const { return 0; }

  GlobalState state(std::uint32_t id) const { return sim_->decode(keys_[id]); }
  const std::string& key(std::uint32_t id) const { return keys_[id]; }
  std::size_t depth(std::uint32_t id) const { return depth_[id]; }
  /// Lock-step turn of the node (0 outside lock-step graphs).
  std::uint32_t turn(std::uint32_t id) const { return turn_[id]; }
  bool expanded(std::uint32_t id) const { return expanded_[id]; }
  /// Expanded with no outgoing edge.
  bool terminal(std::uint32_t id) const { return expanded_[id] && out_[id].empty(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::uint32_t>& out_edges(std::uint32_t id) const { return out_[id]; }

  bool truncated() const { return truncated_; }
  std::size_t max_depth_reached() const { return max_depth_reached_; }
  bool lockstep() const { return lockstep_; }

  /// Directives from the initial state to `id`: the root prefix followed by
  /// the BFS tree path.
  Schedule path_to(std::uint32_t id) const;
  /// Schedule that led from the initial state to the graph root (non-empty
  /// when exploring from a later state).
  const Schedule& root_prefix() const { return root_prefix_; }

  /// "states=... edges=... depth=... truncated=..."
  std::string summary() const;
  /// One line per edge: "src dst label outcome".
  std::string edge_dump() const;

 private:
  friend StateGraph explore(const Simulator&, const ExploreBounds&, std::optional<GlobalState>,
                            Schedule);

  std::uint32_t intern(std::string key, std::uint32_t turn, std::size_t depth, bool& fresh);

  const Simulator* sim_;
  std::vector<std::string> keys_;
  std::vector<std::uint32_t> depth_;
  std::vector<std::uint32_t> turn_;
  std::vector<bool> expanded_;
  std::vector<std::uint32_t> parent_edge_;
  std::vector<std::vector<std::uint32_t>> out_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::uint32_t> index_;
  bool truncated_ = false;
  bool lockstep_ = false;
  std::size_t max_depth_reached_ = 0;
  Schedule root_prefix_;
};

/// Breadth-first expansion with deduplication. Each node is expanded over
/// every enabled process (crash edges and write-target choices when
/// enabled). Hitting a bound marks the graph truncated instead of failing.
/// `root` defaults to the initial state; `root_prefix` is the schedule that
/// produced it, kept so witnesses replay from the start.
StateGraph explore(const Simulator& sim, const ExploreBounds& bounds,
                   std::optional<GlobalState> root = std::nullopt, Schedule root_prefix = {});

}  // namespace anonmem
