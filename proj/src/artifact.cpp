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

#include "anonmem/artifact.hpp"

#include <charconv>
#include <sstream>

#include "anonmem/error.hpp"
#include "anonmem/value.hpp"

namespace anonmem {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                      std::string(text) + "'");
  }
  return v;
}

const std::string* find(const std::map<std::string, std::string>& kv, const char* key) {
  auto it = kv.find(key);
  return it == kv.end() ? nullptr : &it->second;
}

const std::string& need(const std::map<std::string, std::string>& kv, const char* key) {
  if (auto* v = find(kv, key)) return *v;
  throw ConfigError(std::string(key) + ": missing");
}

}  // namespace

std::string_view to_string(ExitRule rule) {
  return rule == ExitRule::RoundReachesN ? "round" : "owns-all";
}

ExitRule parse_exit_rule(std::string_view text) {
  if (text == "round") return ExitRule::RoundReachesN;
  if (text == "owns-all") return ExitRule::OwnsAllRegisters;
  throw ConfigError("exit: expected 'round' or 'owns-all', got '" + std::string(text) + "'");
}

Holds parse_holds(std::string_view text) {
  if (text == "true") return Holds::True;
  if (text == "false") return Holds::False;
  if (text == "inconclusive") return Holds::Inconclusive;
  throw ConfigError("verdict: expected true, false or inconclusive");
}

std::string format_inputs(const std::vector<std::uint64_t>& inputs) {
  std::string out;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(inputs[i]);
  }
  return out;
}

std::vector<std::uint64_t> parse_inputs(std::string_view text) {
  std::vector<std::uint64_t> out;
  text = trim(text);
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = text.find(',', start);
    auto tok = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (tok == "B" || tok == "⊥") throw ConfigError("inputs: bottom is not a valid input");
    std::uint64_t v = parse_u64("inputs", tok);
    if (v > Value::kMaxPayload) throw ConfigError("inputs: value out of range");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false");
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

void put_config(std::map<std::string, std::string>& kv, const RunConfig& c) {
  kv["protocol"] = std::string(to_string(c.protocol));
  kv["n"] = std::to_string(c.n);
  kv["m"] = std::to_string(c.m);
  kv["inputs"] = format_inputs(c.inputs);
  kv["perms"] = c.perms.to_string();
  kv["abortable"] = c.abortable ? "true" : "false";
  kv["exit"] = std::string(to_string(c.exit_rule));
  kv["acquisitions"] = std::to_string(c.acquisitions);
  kv["choice"] = c.choice == ChoicePolicy::Random ? "random" : "smallest";
  kv["choice_seed"] = std::to_string(c.choice_seed);
  kv["step_budget"] = std::to_string(c.step_budget);
}

RunConfig get_config(const std::map<std::string, std::string>& kv) {
  RunConfig c;
  c.protocol = parse_protocol(need(kv, "protocol"));
  c.n = parse_u64("n", need(kv, "n"));
  c.m = parse_u64("m", need(kv, "m"));
  if (auto* v = find(kv, "inputs")) c.inputs = parse_inputs(*v);
  if (auto* v = find(kv, "perms"); v && !v->empty()) c.perms = PermutationTable::parse(*v);
  if (auto* v = find(kv, "abortable")) c.abortable = parse_bool("abortable", *v);
  if (auto* v = find(kv, "exit")) c.exit_rule = parse_exit_rule(*v);
  if (auto* v = find(kv, "acquisitions")) {
    c.acquisitions = static_cast<std::uint32_t>(parse_u64("acquisitions", *v));
  }
  if (auto* v = find(kv, "choice")) {
    if (*v == "random") c.choice = ChoicePolicy::Random;
    else if (*v == "smallest") c.choice = ChoicePolicy::Smallest;
    else throw ConfigError("choice: expected smallest or random");
  }
  if (auto* v = find(kv, "choice_seed")) c.choice_seed = parse_u64("choice_seed", *v);
  if (auto* v = find(kv, "step_budget")) c.step_budget = parse_u64("step_budget", *v);
  c.validate();
  return c;
}

Artifact Artifact::from_trace(const Trace& trace) {
  Artifact a;
  a.config = trace.config;
  a.schedule = trace.schedule;
  a.trace_hash = trace.hash();
  a.events = trace.events;
  return a;
}

Artifact Artifact::from_verdict(const Verdict& verdict, std::size_t k) {
  if (!verdict.witness) throw std::invalid_argument("verdict carries no witness");
  const Witness& w = *verdict.witness;
  Trace t = run(w.config, w.schedule);
  Artifact a = from_trace(t);
  a.property = verdict.property;
  a.holds = verdict.holds;
  a.k = k;
  a.cycle_start = w.cycle_start;
  a.stuck_at = w.stuck_at;
  a.lockstep = w.lockstep;
  return a;
}

Witness Artifact::witness() const {
  return Witness{config, schedule, cycle_start, stuck_at, lockstep};
}

std::string Artifact::serialize() const {
  std::map<std::string, std::string> kv;
  put_config(kv, config);
  kv["schedule"] = format_schedule(schedule);
  if (!property.empty()) kv["property"] = property;
  if (holds) kv["verdict"] = std::string(to_string(*holds));
  kv["k"] = std::to_string(k);
  if (trace_hash) kv["trace_hash"] = std::to_string(*trace_hash);
  if (cycle_start) kv["cycle_start"] = std::to_string(*cycle_start);
  if (stuck_at) kv["stuck_at"] = std::to_string(*stuck_at);
  kv["lockstep"] = lockstep ? "true" : "false";
  std::string out;
  for (const auto& [key, value] : kv) out += key + "=" + value + "\n";
  if (!events.empty()) {
    out += "---\n";
    for (const auto& e : events) out += e.to_line() + "\n";
  }
  return out;
}

Artifact Artifact::parse(std::string_view text) {
  std::string_view header = text, body;
  if (auto sep = text.find("\n---\n"); sep != std::string_view::npos) {
    header = text.substr(0, sep + 1);
    body = text.substr(sep + 5);
  } else if (text.rfind("---\n", 0) == 0) {
    throw ConfigError("artifact: empty header");
  }
  auto kv = parse_key_values(header);
  Artifact a;
  a.config = get_config(kv);
  a.schedule = parse_schedule(need(kv, "schedule"));
  if (auto* v = find(kv, "property")) a.property = *v;
  if (auto* v = find(kv, "verdict")) a.holds = parse_holds(*v);
  if (auto* v = find(kv, "k")) a.k = parse_u64("k", *v);
  if (auto* v = find(kv, "trace_hash")) a.trace_hash = parse_u64("trace_hash", *v);
  if (auto* v = find(kv, "cycle_start")) a.cycle_start = parse_u64("cycle_start", *v);
  if (auto* v = find(kv, "stuck_at")) a.stuck_at = parse_u64("stuck_at", *v);
  if (auto* v = find(kv, "lockstep")) a.lockstep = parse_bool("lockstep", *v);
  std::istringstream in{std::string(body)};
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) a.events.push_back(MemoryEvent::parse_line(line));
  }
  return a;
}

}  // namespace anonmem
