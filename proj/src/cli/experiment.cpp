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

#include "anonmem/experiment.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "anonmem/admissibility.hpp"
#include "anonmem/artifact.hpp"
#include "anonmem/error.hpp"

namespace anonmem {

namespace fs = std::filesystem;

namespace {

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

double to_probability(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(v >= 0.0 && v <= 1.0)) {
    throw ConfigError(key + ": expected a probability in [0, 1]");
  }
  return v;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + path.string());
}

// "1@5": crash process 1 before the 5th directive.
std::pair<std::uint32_t, std::size_t> parse_crash(const std::string& text) {
  auto at = text.find('@');
  if (at == std::string::npos) throw ConfigError("crash: expected <pid>@<step>, got '" + text + "'");
  auto pid = to_u64("crash", text.substr(0, at));
  auto step = to_u64("crash", text.substr(at + 1));
  if (pid < 1 || step < 1) throw ConfigError("crash: pid and step are 1-based");
  return {static_cast<std::uint32_t>(pid - 1), static_cast<std::size_t>(step - 1)};
}

const std::vector<std::string>& known_properties(ProtocolKind kind) {
  static const std::vector<std::string> mutex{"mutual_exclusion", "ladder",
                                              "ownership_partition", "deadlock_freedom",
                                              "round_progress", "livelock", "termination"};
  static const std::vector<std::string> agreement{"agreement", "validity", "wait_freedom",
                                                  "obstruction_freedom", "livelock"};
  return kind == ProtocolKind::Mutex ? mutex : agreement;
}

std::vector<std::string> default_properties(const ExperimentSpec& spec) {
  const auto& c = spec.config;
  switch (c.protocol) {
    case ProtocolKind::Mutex: {
      std::vector<std::string> p{"mutual_exclusion", "ladder", "ownership_partition",
                                 "deadlock_freedom", "round_progress"};
      if (spec.bounds.lockstep) p.push_back("livelock");
      if (c.abortable) p.push_back("termination");
      return p;
    }
    case ProtocolKind::Consensus:
      return {"agreement", "validity", "wait_freedom", "obstruction_freedom"};
    case ProtocolKind::SetAgreement:
      return {"agreement", "validity", "obstruction_freedom"};
  }
  return {};
}

std::string default_stamp(const ExperimentSpec& spec) {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << to_string(spec.mode);
  if (spec.mode != Mode::Admissible && spec.mode != Mode::Replay) {
    os << '-' << to_string(spec.config.protocol) << "-n" << spec.config.n << "-m"
       << spec.config.m;
  }
  os << '-' << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

Holds combine(Holds a, Holds b) {
  if (a == Holds::False || b == Holds::False) return Holds::False;
  if (a == Holds::Inconclusive || b == Holds::Inconclusive) return Holds::Inconclusive;
  return Holds::True;
}

int exit_for(Holds h) {
  switch (h) {
    case Holds::True: return exit_code::kHolds;
    case Holds::False: return exit_code::kViolation;
    case Holds::Inconclusive: return exit_code::kInconclusive;
  }
  return exit_code::kInternal;
}

Verdict livelock_verdict(const StateGraph& graph) {
  auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  v.property = "livelock";
  v.states = graph.size();
  if (auto w = detect_livelock_cycle(graph)) {
    v.holds = Holds::False;
    v.detail = "progress-free cycle";
    v.witness = std::move(w);
  } else {
    v.holds = graph.truncated() ? Holds::Inconclusive : Holds::True;
    if (graph.truncated()) v.detail = "graph truncated";
  }
  v.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

Verdict evaluate(const ExperimentSpec& spec, const std::string& property, const StateGraph& graph) {
  if (property == "mutual_exclusion") return check_mutual_exclusion(graph);
  if (property == "ladder") return check_ladder(graph);
  if (property == "ownership_partition") return check_ownership_partition(graph);
  if (property == "deadlock_freedom") return check_deadlock_freedom(graph);
  if (property == "round_progress") return check_round_progress(graph);
  if (property == "termination") return check_termination(graph);
  if (property == "livelock") return livelock_verdict(graph);
  if (property == "agreement") return check_agreement(graph, spec.agreement_k());
  if (property == "validity") return check_validity(graph);
  if (property == "wait_freedom") return check_wait_freedom_bound(graph, spec.wait_bound());
  if (property == "obstruction_freedom") return check_obstruction_freedom(graph, spec.solo_budget());
  throw ConfigError("property: unknown '" + property + "'");
}

struct Output {
  fs::path dir;
  std::vector<std::string> records;

  fs::path witness(const Verdict& v, std::size_t k, const std::string& tag) {
    fs::path p = dir / "witnesses" / (v.property + tag + ".witness");
    write_file(p, Artifact::from_verdict(v, k).serialize());
    return p;
  }
  void record(const Verdict& v, const fs::path& witness_path) {
    records.push_back(v.record(witness_path.empty() ? "-" : witness_path.string()));
  }
  void flush() {
    std::string text;
    for (const auto& r : records) text += r + "\n";
    write_file(dir / "verdicts" / "verdicts.txt", text);
  }
};

void print_verdict(std::ostream& out, const Verdict& v, const fs::path& witness) {
  out << v.property << ": " << to_string(v.holds);
  if (!v.detail.empty()) out << " (" << v.detail << ")";
  out << " states=" << v.states;
  if (!witness.empty()) out << " witness=" << witness.string();
  out << "\n";
}

Schedule with_crashes(Schedule s, const std::vector<std::pair<std::uint32_t, std::size_t>>& plan) {
  auto sorted = plan;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [pid, at] : sorted) {
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(std::min(at, s.size())), Directive::crash(pid));
  }
  return s;
}

int do_admissible(const ExperimentSpec& spec, std::ostream& out) {
  auto set = admissible_sizes(spec.config.n, spec.limit);
  for (auto m : set.members) out << m << "\n";
  return exit_code::kHolds;
}

int do_run(const ExperimentSpec& spec, Output& o, std::ostream& out) {
  RunConfig cfg = spec.config;
  cfg.perms = spec.tables().front();
  Simulator sim(cfg);
  Schedule s = spec.schedule ? *spec.schedule
                             : random_schedule(sim, spec.seed, spec.length, spec.crash_probability);
  s = with_crashes(std::move(s), spec.crash_plan);
  Trace t = run(sim, s);
  fs::path trace_path = o.dir / "traces" / "run.trace";
  write_file(trace_path, Artifact::from_trace(t).serialize());

  out << "steps=" << t.events.size() << " directives=" << t.schedule.size()
      << " trace_hash=" << t.hash() << (t.truncated ? " truncated" : "") << "\n";
  for (std::uint32_t p = 0; p < sim.processes(); ++p) {
    out << "p" << p + 1 << ": " << to_string(sim.status(t.final_state, p))
        << " accesses=" << t.accesses_by(p);
    if (auto d = sim.decision(t.final_state, p)) out << " decided=" << *d;
    out << "\n";
  }
  out << "trace=" << trace_path.string() << "\n";

  std::vector<Verdict> verdicts;
  if (cfg.protocol == ProtocolKind::Mutex) {
    verdicts.push_back(check_mutual_exclusion(t));
    verdicts.push_back(check_ladder(t));
  } else {
    auto d = sim.decisions(t.final_state);
    verdicts.push_back(check_agreement(d, spec.agreement_k()));
    verdicts.push_back(check_validity(d, cfg.inputs));
  }
  Holds overall = t.truncated ? Holds::Inconclusive : Holds::True;
  for (auto& v : verdicts) {
    if (v.holds == Holds::False && !v.witness) v.witness = Witness{cfg, t.schedule, {}, {}};
    fs::path w = v.holds == Holds::False ? o.witness(v, spec.agreement_k(), "") : fs::path{};
    o.record(v, w);
    print_verdict(out, v, w);
    overall = combine(overall, v.holds);
  }
  return exit_for(overall);
}

int do_explore(const ExperimentSpec& spec, Output& o, std::ostream& out) {
  auto tables = spec.tables();
  bool truncated = false;
  std::string summaries;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    RunConfig cfg = spec.config;
    cfg.perms = tables[i];
    Simulator sim(cfg);
    StateGraph g = explore(sim, spec.bounds);
    truncated = truncated || g.truncated();
    std::string line = "perms=" + cfg.perms.to_string() + " " + g.summary();
    summaries += line + "\n";
    out << line << "\n";
    if (spec.dump_edges) {
      write_file(o.dir / "traces" / ("edges-" + std::to_string(i) + ".txt"), g.edge_dump());
    }
  }
  write_file(o.dir / "verdicts" / "summary.txt", summaries);
  return truncated ? exit_code::kInconclusive : exit_code::kHolds;
}

int do_check(const ExperimentSpec& spec, Output& o, std::ostream& out) {
  auto props = spec.properties.empty() ? default_properties(spec) : spec.properties;
  for (const auto& p : props) {
    const auto& known = known_properties(spec.config.protocol);
    if (std::find(known.begin(), known.end(), p) == known.end()) {
      throw ConfigError("property: '" + p + "' does not apply to " +
                        std::string(to_string(spec.config.protocol)));
    }
  }
  auto tables = spec.tables();
  std::map<std::string, Verdict> merged;
  for (const auto& p : props) merged[p] = Verdict{p, Holds::True, std::nullopt, 0, 0.0, {}};

  for (const auto& table : tables) {
    RunConfig cfg = spec.config;
    cfg.perms = table;
    Simulator sim(cfg);
    StateGraph g = explore(sim, spec.bounds);
    out << "perms=" << table.to_string() << " " << g.summary() << "\n";
    for (const auto& p : props) {
      Verdict& acc = merged[p];
      if (acc.holds == Holds::False) continue;
      Verdict v = evaluate(spec, p, g);
      acc.states += v.states;
      acc.wall_ms += v.wall_ms;
      if (v.holds == Holds::False) {
        acc.holds = Holds::False;
        acc.witness = std::move(v.witness);
        acc.detail = v.detail + " perms=" + table.to_string();
      } else if (v.holds == Holds::Inconclusive) {
        acc.holds = Holds::Inconclusive;
        acc.detail = v.detail;
      } else if (acc.detail.empty()) {
        acc.detail = v.detail;
      }
    }
  }

  if (spec.probe_enabled && spec.config.protocol == ProtocolKind::Mutex &&
      merged.count("deadlock_freedom") && merged["deadlock_freedom"].holds != Holds::False) {
    for (const auto& table : tables) {
      RunConfig cfg = spec.config;
      cfg.perms = table;
      Verdict v = probe_deadlock_freedom(cfg, spec.probe);
      Verdict& acc = merged["deadlock_freedom"];
      acc.states += v.states;
      acc.wall_ms += v.wall_ms;
      if (v.holds == Holds::False) {
        acc = std::move(v);
        break;
      }
    }
  }

  Holds overall = Holds::True;
  for (const auto& p : props) {
    Verdict& v = merged[p];
    fs::path w;
    if (v.holds == Holds::False && v.witness) w = o.witness(v, spec.agreement_k(), "");
    o.record(v, w);
    print_verdict(out, v, w);
    overall = combine(overall, v.holds);
  }
  return exit_for(overall);
}

int do_hunt(const ExperimentSpec& spec, Output& o, std::ostream& out) {
  RunConfig cfg = spec.config;
  HuntOptions h = spec.hunt;
  h.k = spec.k == 0 ? 1 : spec.k;
  if (spec.perm_source != "identity" || !h.randomize_perms) {
    cfg.perms = spec.tables().front();
    h.randomize_perms = false;
  }
  Verdict v = hunt_agreement_violation(cfg, h);
  fs::path w;
  if (v.holds == Holds::False && v.witness) w = o.witness(v, h.k, "");
  o.record(v, w);
  print_verdict(out, v, w);
  if (v.witness) {
    out << "perms=" << v.witness->config.perms.to_string() << "\n"
        << "schedule=" << format_schedule(v.witness->schedule) << "\n";
  }
  return exit_for(v.holds);
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Admissible: return "admissible";
    case Mode::Run: return "run";
    case Mode::Explore: return "explore";
    case Mode::Check: return "check";
    case Mode::Hunt: return "hunt";
    case Mode::Replay: return "replay";
  }
  return "?";
}

std::size_t ExperimentSpec::agreement_k() const {
  if (k != 0) return k;
  return config.protocol == ProtocolKind::SetAgreement ? config.n - 1 : 1;
}

std::size_t ExperimentSpec::solo_budget() const {
  if (budget != 0) return budget;
  if (config.protocol == ProtocolKind::Consensus) return 2 * config.m;
  return (config.m + 1) * (config.m + 1) + config.m;
}

std::size_t ExperimentSpec::wait_bound() const { return bound != 0 ? bound : 2 * config.m; }

std::vector<PermutationTable> ExperimentSpec::tables() const {
  const std::size_t n = config.n, m = config.m;
  const std::string& src = perm_source;
  if (src == "identity") return {PermutationTable::identity(n, m)};
  if (src == "all") {
    std::uint64_t total = PermutationTable::enumeration_size(n, m);
    if (total > 100'000) throw ConfigError("perms: 'all' would enumerate too many tables");
    std::vector<PermutationTable> out;
    for (std::uint64_t i = 0; i < total; ++i) out.push_back(PermutationTable::enumerate(n, m, i));
    return out;
  }
  if (src.rfind("seeded:", 0) == 0) {
    return {PermutationTable::seeded(n, m, to_u64("perms", src.substr(7)))};
  }
  if (src.rfind("index:", 0) == 0) {
    return {PermutationTable::enumerate(n, m, to_u64("perms", src.substr(6)))};
  }
  auto t = PermutationTable::parse(src);
  if (t.processes() != n || t.registers() != m) {
    throw ConfigError("perms: table does not match n and m");
  }
  return {t};
}

ExperimentSpec spec_from_values(Mode mode, const std::map<std::string, std::string>& kv,
                                const std::vector<std::string>& crashes,
                                const std::vector<std::string>& properties) {
  ExperimentSpec s;
  s.mode = mode;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  auto flag = [&](const char* key) {
    auto* v = get(key);
    return v && parse_bool(key, *v);
  };

  if (auto* v = get("out")) s.out_root = *v;
  if (auto* v = get("stamp")) s.stamp = *v;

  if (mode == Mode::Replay) {
    auto* v = get("artifact");
    if (!v) throw ConfigError("artifact: replay needs a trace or witness file");
    s.artifact_path = *v;
    return s;
  }

  if (auto* v = get("n")) {
    s.config.n = to_u64("n", *v);
  } else if (mode == Mode::Admissible) {
    throw ConfigError("n: missing");
  }
  if (s.config.n < 2) throw ConfigError("n: must be >= 2");
  if (mode == Mode::Admissible) {
    if (auto* v = get("limit")) s.limit = to_u64("limit", *v);
    if (s.limit < 1) throw ConfigError("limit: must be >= 1");
    return s;
  }

  auto* proto = get("protocol");
  if (!proto && mode != Mode::Hunt) throw ConfigError("protocol: missing");
  s.config.protocol = proto ? parse_protocol(*proto) : ProtocolKind::SetAgreement;
  if (auto* v = get("m")) s.config.m = to_u64("m", *v);
  if (s.config.m < 1) throw ConfigError("m: must be >= 1");
  if (auto* v = get("inputs")) s.config.inputs = parse_inputs(*v);
  if (s.config.protocol != ProtocolKind::Mutex && s.config.inputs.empty()) {
    for (std::size_t i = 0; i < s.config.n; ++i) s.config.inputs.push_back(i + 1);
  }
  if (auto* v = get("memory")) {
    bool rw = *v == "rw";
    if (!rw && *v != "rmw") throw ConfigError("memory: expected rw or rmw");
    if (rw != (s.config.model() == RegisterModel::ReadWrite)) {
      throw ConfigError(std::string("memory: ") + std::string(to_string(s.config.protocol)) +
                        " runs on " + std::string(to_string(s.config.model())) + " registers");
    }
  }
  s.config.abortable = flag("abortable");
  if (auto* v = get("exit")) s.config.exit_rule = parse_exit_rule(*v);
  if (auto* v = get("acquisitions")) {
    s.config.acquisitions = static_cast<std::uint32_t>(to_u64("acquisitions", *v));
  }
  if (auto* v = get("choice")) {
    if (*v == "random") s.config.choice = ChoicePolicy::Random;
    else if (*v != "smallest") throw ConfigError("choice: expected smallest or random");
  }
  if (auto* v = get("choice_seed")) s.config.choice_seed = to_u64("choice_seed", *v);
  if (auto* v = get("step_budget")) s.config.step_budget = to_u64("step_budget", *v);
  if (auto* v = get("perms")) s.perm_source = *v;
  s.config.validate();

  for (const auto& c : crashes) s.crash_plan.push_back(parse_crash(c));
  if (auto* v = get("crash_prob")) s.crash_probability = to_probability("crash_prob", *v);
  if (!s.config.crashes_allowed() && (!s.crash_plan.empty() || s.crash_probability > 0)) {
    throw ConfigError("crash: mutex runs are failure-free");
  }
  for (const auto& [pid, at] : s.crash_plan) {
    if (pid >= s.config.n) throw ConfigError("crash: no process " + std::to_string(pid + 1));
  }

  if (auto* v = get("schedule")) s.schedule = parse_schedule(*v);
  if (auto* v = get("seed")) s.seed = to_u64("seed", *v);
  if (auto* v = get("length")) s.length = to_u64("length", *v);

  if (auto* v = get("max_states")) s.bounds.max_states = to_u64("max_states", *v);
  if (auto* v = get("max_depth")) s.bounds.max_depth = to_u64("max_depth", *v);
  if (s.bounds.max_states == 0 || s.bounds.max_depth == 0) {
    throw ConfigError("max_states: bounds must be positive");
  }
  s.bounds.branch_on_crashes = flag("crashes");
  s.bounds.branch_on_choice = flag("choices");
  s.bounds.lockstep = flag("lockstep");
  if (s.bounds.branch_on_crashes && !s.config.crashes_allowed()) {
    throw ConfigError("crashes: mutex runs are failure-free");
  }
  s.dump_edges = flag("edges");

  s.properties = properties;
  if (auto* v = get("k")) s.k = to_u64("k", *v);
  if (auto* v = get("budget")) s.budget = to_u64("budget", *v);
  if (auto* v = get("bound")) s.bound = to_u64("bound", *v);
  if (auto* v = get("probe_walks")) {
    s.probe.walks = to_u64("probe_walks", *v);
    s.probe_enabled = s.probe.walks > 0;
  }
  if (auto* v = get("probe_length")) s.probe.walk_length = to_u64("probe_length", *v);
  if (auto* v = get("probe_seed")) s.probe.seed = to_u64("probe_seed", *v);
  if (auto* v = get("closure_states")) s.probe.closure_states = to_u64("closure_states", *v);

  if (mode == Mode::Hunt) {
    if (s.config.protocol != ProtocolKind::SetAgreement) {
      throw ConfigError("protocol: hunt needs setagreement");
    }
    if (auto* v = get("walks")) s.hunt.walks = to_u64("walks", *v);
    if (auto* v = get("walk_length")) s.hunt.walk_length = to_u64("walk_length", *v);
    if (auto* v = get("bfs_states")) s.hunt.bfs_states = to_u64("bfs_states", *v);
    if (auto* v = get("seed")) s.hunt.seed = to_u64("seed", *v);
    if (auto* v = get("closure_states")) s.hunt.closure_states = to_u64("closure_states", *v);
    s.hunt.randomize_perms = !flag("fixed_perms");
  }
  if (mode == Mode::Run && s.perm_source == "all") {
    throw ConfigError("perms: a run needs a single table");
  }
  s.tables();  // validates the permutation source early
  return s;
}

ExperimentSpec parse_spec(int argc, const char* const* argv) {
  return parse_spec(argc, argv, std::cout, std::cerr);
}

ExperimentSpec parse_spec(int argc, const char* const* argv, std::ostream& out,
                          std::ostream& err) {
  CLI::App app{"Simulator and bounded model checker for anonymous shared-memory protocols",
               "anonmem"};
  app.require_subcommand(1);
  std::map<std::string, std::string> given;
  std::vector<std::string> crashes, properties;
  std::string config_file;

  auto value = [&](CLI::App* sub, const std::string& name, const std::string& help) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    sub->add_option_function<std::string>(
        "--" + name, [&given, key](const std::string& v) { given[key] = v; }, help);
  };
  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& help) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    sub->add_flag_callback("--" + name, [&given, key] { given[key] = "true"; }, help);
  };
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "flat key=value file; flags override it");
    value(sub, "protocol", "mutex | consensus | setagreement");
    value(sub, "n", "number of processes");
    value(sub, "m", "number of registers");
    value(sub, "inputs", "comma-separated proposals, one per process");
    value(sub, "memory", "rw | rmw (checked against the protocol)");
    flag(sub, "abortable", "mutex: abortable variant");
    value(sub, "exit", "mutex exit rule: round | owns-all");
    value(sub, "acquisitions", "mutex: acquire/release rounds per process");
    value(sub, "perms", "identity | all | seeded:<s> | index:<k> | table like 2,3,1;1,2,3");
    value(sub, "choice", "set agreement write target: smallest | random");
    value(sub, "choice-seed", "seed for random write targets");
    value(sub, "step-budget", "maximum shared accesses per run");
    value(sub, "out", "output root (default $ANONMEM_OUT or ./anonmem-out)");
    value(sub, "stamp", "experiment directory name under the output root");
  };
  auto bounds = [&](CLI::App* sub) {
    value(sub, "max-states", "state cap");
    value(sub, "max-depth", "depth cap in shared accesses");
    flag(sub, "crashes", "branch on crashes");
    flag(sub, "choices", "branch on write targets");
    flag(sub, "lockstep", "round-robin successors only");
  };

  auto* adm = app.add_subcommand("admissible", "list admissible memory sizes");
  value(adm, "n", "number of processes");
  value(adm, "limit", "largest m to consider");

  auto* run_cmd = app.add_subcommand("run", "execute one schedule and write its trace");
  common(run_cmd);
  value(run_cmd, "schedule", "tokens S<p>, S<p>:<k>, C<p> with optional *count");
  value(run_cmd, "seed", "random schedule seed (when no --schedule)");
  value(run_cmd, "length", "random schedule length");
  value(run_cmd, "crash-prob", "random schedule crash probability");
  run_cmd->add_option("--crash", crashes, "<pid>@<step>: crash before that directive");

  auto* explore_cmd = app.add_subcommand("explore", "explore the reachable state graph");
  common(explore_cmd);
  bounds(explore_cmd);
  flag(explore_cmd, "edges", "dump every edge");

  auto* check_cmd = app.add_subcommand("check", "explore and check properties");
  common(check_cmd);
  bounds(check_cmd);
  check_cmd->add_option("--property", properties, "property to check (repeatable)");
  value(check_cmd, "k", "agreement: number of distinct values allowed");
  value(check_cmd, "budget", "obstruction freedom: solo steps");
  value(check_cmd, "bound", "wait freedom: accesses per process");
  value(check_cmd, "probe-walks", "mutex: random walks probing stalled states");
  value(check_cmd, "probe-length", "mutex: steps per probe walk");
  value(check_cmd, "probe-seed", "mutex: probe seed");
  value(check_cmd, "closure-states", "state cap for each probed closure");

  auto* hunt_cmd = app.add_subcommand("hunt", "search for a disagreeing set-agreement run");
  common(hunt_cmd);
  value(hunt_cmd, "walks", "random walks");
  value(hunt_cmd, "walk-length", "steps per walk");
  value(hunt_cmd, "bfs-states", "breadth-first sweep size after the walks");
  value(hunt_cmd, "seed", "search seed");
  value(hunt_cmd, "k", "agreement target");
  value(hunt_cmd, "closure-states", "state cap when probing a decided state");
  flag(hunt_cmd, "fixed-perms", "keep the configured permutations for every walk");

  auto* replay_cmd = app.add_subcommand("replay", "re-run a trace or witness file");
  replay_cmd->add_option_function<std::string>(
      "artifact", [&given](const std::string& v) { given["artifact"] = v; }, "file")
      ->required();
  value(replay_cmd, "out", "output root");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    throw;
  }

  Mode mode = Mode::Run;
  for (auto [sub, m] : {std::pair{adm, Mode::Admissible}, std::pair{run_cmd, Mode::Run},
                        std::pair{explore_cmd, Mode::Explore}, std::pair{check_cmd, Mode::Check},
                        std::pair{hunt_cmd, Mode::Hunt}, std::pair{replay_cmd, Mode::Replay}}) {
    if (sub->parsed()) mode = m;
  }

  std::map<std::string, std::string> kv;
  if (!config_file.empty()) {
    kv = parse_key_values(slurp(config_file));
    for (auto& [key, v] : kv) {
      (void)v;
      if (key == "crash") throw ConfigError("crash: give crash plans on the command line");
    }
  }
  for (const auto& [key, v] : given) kv[key] = v;
  if (kv.find("out") == kv.end()) {
    const char* env = std::getenv("ANONMEM_OUT");
    kv["out"] = env && *env ? env : "anonmem-out";
  }
  return spec_from_values(mode, kv, crashes, properties);
}

int execute(const ExperimentSpec& spec, std::ostream& out) {
  if (spec.mode == Mode::Admissible) return do_admissible(spec, out);
  if (spec.mode == Mode::Replay) {
    Verdict v = replay(spec.artifact_path, out);
    return exit_for(v.holds);
  }
  Output o;
  const fs::path root = spec.out_root.empty() ? fs::path("anonmem-out") : spec.out_root;
  if (!spec.stamp.empty()) {
    o.dir = root / spec.stamp;
  } else {
    // Same-second runs get a numeric suffix instead of overwriting.
    const std::string base = default_stamp(spec);
    o.dir = root / base;
    for (int i = 2; fs::exists(o.dir); ++i) o.dir = root / (base + "-" + std::to_string(i));
  }
  std::map<std::string, std::string> kv;
  put_config(kv, spec.config);
  std::string header;
  for (const auto& [k, v] : kv) header += k + "=" + v + "\n";
  header += "mode=" + std::string(to_string(spec.mode)) + "\nperms_source=" + spec.perm_source + "\n";
  write_file(o.dir / "spec.txt", header);

  int code = exit_code::kInternal;
  switch (spec.mode) {
    case Mode::Run: code = do_run(spec, o, out); break;
    case Mode::Explore: code = do_explore(spec, o, out); break;
    case Mode::Check: code = do_check(spec, o, out); break;
    case Mode::Hunt: code = do_hunt(spec, o, out); break;
    default: break;
  }
  if (!o.records.empty()) o.flush();
  out << "artifacts=" << o.dir.string() << "\n";
  return code;
}

Verdict replay(const fs::path& path, std::ostream& out) {
  Artifact a = Artifact::parse(slurp(path));
  Trace t = run(a.config, a.schedule);
  std::uint64_t hash = t.hash();
  out << "trace_hash=" << hash << "\n";
  if (a.trace_hash && *a.trace_hash != hash) {
    throw std::logic_error("replay diverged: stored trace_hash=" + std::to_string(*a.trace_hash) +
                           " replayed=" + std::to_string(hash));
  }
  if (!a.events.empty() && a.events != t.events) {
    throw std::logic_error("replay diverged: event log differs from the stored one");
  }

  Verdict v;
  v.property = a.property.empty() ? "replay" : a.property;
  v.states = t.events.size();
  if (a.property.empty()) {
    v.holds = Holds::True;
    v.detail = "trace reproduced";
  } else {
    bool reproduced = confirm_witness(a.property, a.witness(), a.k);
    v.holds = reproduced ? Holds::False : Holds::True;
    v.detail = reproduced ? "violation reproduced" : "violation not reproduced";
    if (reproduced) v.witness = a.witness();
    if (a.holds && *a.holds == Holds::False && !reproduced) {
      v.detail += " (stored verdict was false)";
    }
  }
  out << v.record(path.string()) << " " << v.detail << "\n";
  return v;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    ExperimentSpec spec = parse_spec(argc, argv, out, err);
    return execute(spec, out);
  } catch (const CLI::ParseError& e) {
    // Already reported by the parser (help text or the error message).
    return e.get_exit_code() == 0 ? exit_code::kHolds : exit_code::kUsage;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const ScheduleError& e) {
    err << "invalid schedule: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return exit_code::kIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_code::kInternal;
  }
}

}  // namespace anonmem
