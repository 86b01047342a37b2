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

#include "anonmem/simulator.hpp"

#include <algorithm>
#include <random>

#include "anonmem/error.hpp"

namespace anonmem {

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Mutex: return "mutex";
    case ProtocolKind::Consensus: return "consensus";
    case ProtocolKind::SetAgreement: return "setagreement";
  }
  return "?";
}

ProtocolKind parse_protocol(std::string_view text) {
  if (text == "mutex") return ProtocolKind::Mutex;
  if (text == "consensus") return ProtocolKind::Consensus;
  if (text == "setagreement" || text == "set-agreement") return ProtocolKind::SetAgreement;
  throw ConfigError("protocol: unknown protocol '" + std::string(text) + "'");
}

std::string_view to_string(ProcessStatus status) {
  switch (status) {
    case ProcessStatus::Active: return "active";
    case ProcessStatus::InCS: return "in-cs";
    case ProcessStatus::Releasing: return "releasing";
    case ProcessStatus::Decided: return "decided";
    case ProcessStatus::Done: return "done";
    case ProcessStatus::Aborted: return "aborted";
    case ProcessStatus::Crashed: return "crashed";
  }
  return "?";
}

RegisterModel RunConfig::model() const {
  return protocol == ProtocolKind::SetAgreement ? RegisterModel::ReadWrite
                                                : RegisterModel::ReadModifyWrite;
}

void RunConfig::validate() {
  if (n < 2) throw ConfigError("n: must be >= 2, got " + std::to_string(n));
  if (m < 1) throw ConfigError("m: must be >= 1, got " + std::to_string(m));
  if (protocol == ProtocolKind::SetAgreement && m < 3) {
    throw ConfigError("m: set agreement needs at least 3 registers, got " + std::to_string(m));
  }
  if (protocol == ProtocolKind::Mutex) {
    if (!inputs.empty()) throw ConfigError("inputs: mutex takes no inputs");
    if (acquisitions < 1) throw ConfigError("acquisitions: must be >= 1");
  } else {
    if (inputs.size() != n) {
      throw ConfigError("inputs: expected " + std::to_string(n) + " values, got " +
                        std::to_string(inputs.size()));
    }
    for (auto v : inputs) {
      if (v > Value::kMaxPayload) throw ConfigError("inputs: value out of range");
    }
    if (abortable) throw ConfigError("abortable: only meaningful for mutex");
  }
  if (perms.processes() == 0) perms = PermutationTable::identity(n, m);
  if (perms.processes() != n || perms.registers() != m) {
    throw ConfigError("perms: table is " + std::to_string(perms.processes()) + "x" +
                      std::to_string(perms.registers()) + ", expected " + std::to_string(n) +
                      "x" + std::to_string(m));
  }
}

// -- Simulator ---------------------------------------------------------------

Simulator::Simulator(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  switch (config_.protocol) {
    case ProtocolKind::Mutex:
      mutex_.emplace(MutexOptions{config_.n, config_.m, config_.abortable, config_.exit_rule,
                                  config_.acquisitions});
      break;
    case ProtocolKind::Consensus:
      consensus_.emplace(config_.m);
      break;
    case ProtocolKind::SetAgreement:
      set_agreement_.emplace(config_.m);
      break;
  }
}

GlobalState Simulator::initial_state() const {
  GlobalState g;
  g.memory = AnonymousMemory(config_.m, config_.model());
  g.procs.reserve(config_.n);
  for (std::size_t i = 0; i < config_.n; ++i) {
    switch (config_.protocol) {
      case ProtocolKind::Mutex: g.procs.push_back({mutex_->init(), false}); break;
      case ProtocolKind::Consensus:
        g.procs.push_back({consensus_->init(config_.inputs[i]), false});
        break;
      case ProtocolKind::SetAgreement:
        g.procs.push_back({set_agreement_->init(config_.inputs[i]), false});
        break;
    }
  }
  return g;
}

ProcessStatus Simulator::status(const GlobalState& g, std::uint32_t pid) const {
  const auto& slot = g.procs.at(pid);
  if (slot.crashed) return ProcessStatus::Crashed;
  return std::visit(
      [](const auto& s) -> ProcessStatus {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MutexState>) {
          switch (s.pc) {
            case MutexState::Pc::InCriticalSection: return ProcessStatus::InCS;
            case MutexState::Pc::Release: return ProcessStatus::Releasing;
            case MutexState::Pc::Done: return ProcessStatus::Done;
            case MutexState::Pc::Aborted: return ProcessStatus::Aborted;
            default: return ProcessStatus::Active;
          }
        } else {
          return s.decided ? ProcessStatus::Decided : ProcessStatus::Active;
        }
      },
      slot.local);
}

bool Simulator::enabled(const GlobalState& g, std::uint32_t pid) const {
  switch (status(g, pid)) {
    case ProcessStatus::Active:
    case ProcessStatus::InCS:
    case ProcessStatus::Releasing:
      return true;
    default:
      return false;
  }
}

bool Simulator::any_enabled(const GlobalState& g) const {
  for (std::uint32_t p = 0; p < config_.n; ++p) {
    if (enabled(g, p)) return true;
  }
  return false;
}

std::vector<std::uint32_t> Simulator::choice_options(const GlobalState& g,
                                                     std::uint32_t pid) const {
  if (!set_agreement_ || !enabled(g, pid)) return {};
  return set_agreement_->write_candidates(std::get<SetAgreementState>(g.procs[pid].local));
}

StepOutcome Simulator::apply(GlobalState& g, const Directive& d,
                             std::vector<MemoryEvent>* log) const {
  if (d.pid >= config_.n) {
    throw ScheduleError("directive " + d.to_string() + " names a process that does not exist");
  }
  if (!enabled(g, d.pid)) {
    throw ScheduleError("directive " + d.to_string() + " targets a " +
                        std::string(to_string(status(g, d.pid))) + " process");
  }
  auto& slot = g.procs[d.pid];
  if (d.kind == Directive::Kind::Crash) {
    if (!config_.crashes_allowed()) {
      throw ConfigError("crash: mutex runs are failure-free");
    }
    slot.crashed = true;
    return StepOutcome::running();
  }
  const Permutation& f = config_.perms[d.pid];
  switch (config_.protocol) {
    case ProtocolKind::Mutex: {
      if (d.choice) throw ScheduleError("mutex steps take no write choice");
      RmwPort port(g.memory, f, d.pid, log);
      return mutex_->step(std::get<MutexState>(slot.local), port);
    }
    case ProtocolKind::Consensus: {
      if (d.choice) throw ScheduleError("consensus steps take no write choice");
      RmwPort port(g.memory, f, d.pid, log);
      return consensus_->step(std::get<ConsensusState>(slot.local), port);
    }
    case ProtocolKind::SetAgreement: {
      ReadWritePort port(g.memory, f, d.pid, log);
      return set_agreement_->step(std::get<SetAgreementState>(slot.local), port, d.choice);
    }
  }
  return StepOutcome::running();
}

std::optional<std::uint64_t> Simulator::decision(const GlobalState& g, std::uint32_t pid) const {
  return std::visit(
      [](const auto& s) -> std::optional<std::uint64_t> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MutexState>) {
          return std::nullopt;
        } else {
          return s.decided;
        }
      },
      g.procs.at(pid).local);
}

std::vector<std::uint64_t> Simulator::decisions(const GlobalState& g) const {
  std::vector<std::uint64_t> out;
  for (std::uint32_t p = 0; p < config_.n; ++p) {
    if (auto d = decision(g, p)) out.push_back(*d);
  }
  return out;
}

std::size_t Simulator::in_critical_section(const GlobalState& g) const {
  std::size_t count = 0;
  for (std::uint32_t p = 0; p < config_.n; ++p) {
    if (status(g, p) == ProcessStatus::InCS) ++count;
  }
  return count;
}

std::pair<std::uint32_t, std::size_t> Simulator::top_round(const GlobalState& g) const {
  std::uint32_t top = 0;
  std::size_t holders = 0;
  if (!mutex_) return {0, 0};
  for (const auto& slot : g.procs) {
    const auto& s = std::get<MutexState>(slot.local);
    if (!MutexProtocol::pending_acquire(s) && s.pc != MutexState::Pc::InCriticalSection) continue;
    if (s.round > top) {
      top = s.round;
      holders = 1;
    } else if (s.round == top) {
      ++holders;
    }
  }
  return {top, top == 0 ? 0 : holders};
}

std::string Simulator::encode(const GlobalState& g) const {
  detail::ByteWriter w;
  for (Value v : g.memory.global_view()) w.put(v.raw());
  for (const auto& slot : g.procs) {
    w.put(slot.crashed ? 1 : 0);
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, MutexState>) {
            mutex_->encode(s, w);
          } else if constexpr (std::is_same_v<T, ConsensusState>) {
            consensus_->encode(s, w);
          } else {
            set_agreement_->encode(s, w);
          }
        },
        slot.local);
  }
  return w.take();
}

GlobalState Simulator::decode(std::string_view key) const {
  detail::ByteReader r(key);
  GlobalState g;
  g.memory = AnonymousMemory(config_.m, config_.model());
  for (std::size_t x = 0; x < config_.m; ++x) g.memory.store(x, Value::from_raw(r.get()));
  g.procs.resize(config_.n);
  for (auto& slot : g.procs) {
    slot.crashed = r.get() != 0;
    switch (config_.protocol) {
      case ProtocolKind::Mutex: slot.local = mutex_->decode(r); break;
      case ProtocolKind::Consensus: slot.local = consensus_->decode(r); break;
      case ProtocolKind::SetAgreement: slot.local = set_agreement_->decode(r); break;
    }
  }
  if (!r.done()) throw std::out_of_range("trailing bytes in state encoding");
  return g;
}

// -- Traces ------------------------------------------------------------------

std::size_t Trace::accesses_by(std::uint32_t pid) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const MemoryEvent& e) { return e.pid == pid; }));
}

std::uint64_t event_log_hash(const std::vector<MemoryEvent>& events) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& e : events) {
    mix(e.to_line());
    mix("\n");
  }
  return h;
}

std::uint64_t Trace::hash() const { return event_log_hash(events); }

Trace run(const Simulator& sim, const Schedule& schedule) {
  Trace t;
  t.config = sim.config();
  GlobalState g = sim.initial_state();
  for (const auto& d : schedule) {
    if (d.kind == Directive::Kind::Step && t.events.size() >= sim.config().step_budget) {
      t.truncated = true;
      break;
    }
    StepOutcome out = sim.apply(g, d, &t.events);
    TraceStep ts{d, out, {}};
    ts.statuses.reserve(sim.processes());
    for (std::uint32_t p = 0; p < sim.processes(); ++p) ts.statuses.push_back(sim.status(g, p));
    t.steps.push_back(std::move(ts));
    t.schedule.push_back(d);
  }
  t.final_state = std::move(g);
  return t;
}

Trace run(const RunConfig& config, const Schedule& schedule) {
  return run(Simulator(config), schedule);
}

Schedule lockstep_schedule(const RunConfig& config, std::size_t rounds) {
  if (rounds < 1) throw ConfigError("rounds: must be >= 1");
  Schedule s;
  s.reserve(rounds * config.n);
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::uint32_t p = 0; p < config.n; ++p) s.push_back(Directive::step(p));
  }
  return s;
}

Schedule random_schedule(const Simulator& sim, std::uint64_t seed, std::size_t length,
                         double crash_probability) {
  if (length < 1) throw ConfigError("length: must be >= 1");
  if (crash_probability < 0.0 || crash_probability > 1.0) {
    throw ConfigError("crash probability must lie in [0, 1]");
  }
  if (crash_probability > 0.0 && !sim.config().crashes_allowed()) {
    throw ConfigError("crash: mutex runs are failure-free");
  }
  std::mt19937_64 rng(seed);
  std::mt19937_64 choice_rng(sim.config().choice_seed ^ seed);
  std::bernoulli_distribution crash(crash_probability);
  GlobalState g = sim.initial_state();
  Schedule out;
  std::vector<std::uint32_t> alive;
  while (out.size() < length) {
    alive.clear();
    for (std::uint32_t p = 0; p < sim.processes(); ++p) {
      if (sim.enabled(g, p)) alive.push_back(p);
    }
    if (alive.empty()) break;
    std::uint32_t pid = alive[std::uniform_int_distribution<std::size_t>(0, alive.size() - 1)(rng)];
    Directive d = Directive::step(pid);
    if (crash_probability > 0.0 && crash(rng)) {
      d = Directive::crash(pid);
    } else if (sim.config().choice == ChoicePolicy::Random) {
      auto options = sim.choice_options(g, pid);
      if (!options.empty()) {
        d.choice = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(choice_rng)];
      }
    }
    sim.apply(g, d);
    out.push_back(d);
  }
  return out;
}

SoloResult solo_extension(const Simulator& sim, GlobalState state, std::uint32_t pid,
                          std::size_t budget) {
  if (!sim.enabled(state, pid)) {
    throw ScheduleError("solo extension of a process that cannot step");
  }
  SoloResult r;
  while (r.steps < budget) {
    r.outcome = sim.apply(state, Directive::step(pid));
    ++r.steps;
    if (r.progressed()) break;
  }
  return r;
}

}  // namespace anonmem
