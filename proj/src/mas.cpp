#include "dali/mas.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace dali {

void ChannelMapping::add(const std::string& producer, const std::string& action, const std::string& consumer,
                         const std::string& event) {
  entries_[{producer, action, consumer}] = event;
}

std::optional<std::string> ChannelMapping::route(const AgentProgram& producer, const std::string& action,
                                                 const AgentProgram& consumer) const {
  if (producer.name == consumer.name) return std::nullopt;
  if (auto it = entries_.find({producer.name, action, consumer.name}); it != entries_.end()) return it->second;
  if (consumer.is_external(action)) return action;
  return std::nullopt;
}

std::optional<std::size_t> SystemConfig::find(std::string_view agent) const {
  for (std::size_t i = 0; i < agents.size(); ++i)
    if (agents[i].name == agent) return i;
  return std::nullopt;
}

Strategy SystemConfig::strategy_for(std::string_view agent) const {
  auto it = strategies.find(std::string(agent));
  return it == strategies.end() ? Strategy{} : it->second;
}

std::vector<std::string> validate_config(const SystemConfig& c) {
  std::vector<std::string> errs;
  std::set<std::string> names;
  for (const auto& a : c.agents) {
    if (!names.insert(a.name).second) errs.push_back("duplicate agent name '" + a.name + "'");
    for (const auto& e : validate_program(a).errors)
      errs.push_back(a.name + ": " + std::string(to_string(e.rule)) + ": " + e.message);
  }
  for (const auto& s : c.script) {
    auto idx = c.find(s.agent);
    if (!idx)
      errs.push_back("script names unknown agent '" + s.agent + "'");
    else if (!c.agents[*idx].is_external(s.event))
      errs.push_back("script event '" + s.event + "' is not an external event of " + s.agent);
  }
  for (const auto& [key, event] : c.mapping.entries()) {
    const auto& [producer, action, consumer] = key;
    auto p = c.find(producer);
    auto q = c.find(consumer);
    if (!p)
      errs.push_back("mapping names unknown agent '" + producer + "'");
    else if (!c.agents[*p].is_action(action))
      errs.push_back("mapping source '" + action + "' is not an action of " + producer);
    if (!q)
      errs.push_back("mapping names unknown agent '" + consumer + "'");
    else if (!c.agents[*q].is_external(event))
      errs.push_back("mapping target '" + event + "' is not an external event of " + consumer);
    if (producer == consumer) errs.push_back("mapping from " + producer + " to itself is never delivered");
  }
  if (c.step_budget == 0) errs.push_back("step budget must be positive");
  return errs;
}

namespace {

std::vector<std::pair<std::string_view, std::size_t>> split_fields(std::string_view line) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  for (std::size_t i = 0; i < line.size();) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.emplace_back(line.substr(i, j - i), i + 1);
    i = j;
  }
  return out;
}

}  // namespace

SystemConfig parse_system_config(std::string_view text, const std::string& base_dir, const FileLoader& load,
                                 std::string_view file) {
  SystemConfig cfg;
  auto resolve = [&](std::string_view p) {
    std::filesystem::path path(p);
    return (path.is_absolute() ? path : std::filesystem::path(base_dir) / path).string();
  };

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (auto cut = line.find_first_of("#%"); cut != std::string_view::npos) line = line.substr(0, cut);

    auto f = split_fields(line);
    if (f.empty()) continue;
    auto at = [&](std::size_t col) { return SourceSpan{std::string(file), line_no, col}; };
    const std::string_view key = f[0].first;

    if (key == "agent" || key == "script") {
      if (f.size() != 2) throw ParseError(at(f[0].second), "expected '" + std::string(key) + " <file>'");
      const std::string path = resolve(f[1].first);
      const std::string body = load(path);
      if (key == "agent")
        cfg.agents.push_back(parse_agent_file(body, path));
      else
        for (auto& e : parse_event_script(body, path)) cfg.script.push_back(std::move(e));
    } else if (key == "max_ticks") {
      if (f.size() != 2) throw ParseError(at(f[0].second), "expected 'max_ticks N'");
      std::string_view n = f[1].first;
      auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), cfg.max_ticks);
      if (ec != std::errc() || ptr != n.data() + n.size())
        throw ParseError(at(f[1].second), "max_ticks needs a nonnegative integer");
    } else if (key == "map") {
      if (f.size() != 4 || f[2].first != "->")
        throw ParseError(at(f[0].second), "expected 'map <producer>.<action> -> <consumer>.<event>'");
      auto qualified = [&](std::pair<std::string_view, std::size_t> field) {
        auto dot = field.first.find('.');
        std::string_view a = field.first.substr(0, dot == std::string_view::npos ? 0 : dot);
        std::string_view b = dot == std::string_view::npos ? std::string_view{} : field.first.substr(dot + 1);
        if (!is_identifier(a) || !is_identifier(b))
          throw ParseError(at(field.second), "expected <agent>.<atom>, got '" + std::string(field.first) + "'");
        return std::pair{std::string(a), std::string(b)};
      };
      auto [producer, action] = qualified(f[1]);
      auto [consumer, event] = qualified(f[3]);
      cfg.mapping.add(producer, action, consumer, event);
    } else {
      throw ParseError(at(f[0].second), "unknown system directive '" + std::string(key) + "'");
    }
  }

  std::stable_sort(cfg.script.begin(), cfg.script.end(),
                   [](const ScriptEntry& a, const ScriptEntry& b) { return a.tick < b.tick; });
  return cfg;
}

SystemConfig load_system_config(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return parse_system_config(read_file(path), dir.empty() ? "." : dir, read_file, path);
}

// ---------------------------------------------------------------------------

SystemState make_system_state(const SystemConfig& c) {
  SystemState s;
  s.engines.reserve(c.agents.size());
  for (const auto& a : c.agents) s.engines.emplace_back(a, c.strategy_for(a.name));
  s.inbox.resize(c.agents.size());
  s.inbox_history.resize(c.agents.size());
  return s;
}

void system_tick(SystemState& s, const SystemConfig& c, Execution exec) {
  const std::size_t n = c.agents.size();

  // (1) script entries due now join the inboxes; due deliveries enter EV.
  while (s.script_cursor < c.script.size() && c.script[s.script_cursor].tick <= s.tick) {
    const auto& e = c.script[s.script_cursor++];
    if (auto idx = c.find(e.agent)) s.inbox[*idx].push_back({s.tick, e.event, "script"});
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& box = s.inbox[i];
    auto due = std::stable_partition(box.begin(), box.end(), [&](const Delivery& d) { return d.tick <= s.tick; });
    for (auto it = box.begin(); it != due; ++it) {
      s.engines[i].inject(it->event);
      s.inbox_history[i].push_back(*it);
    }
    box.erase(box.begin(), due);
  }

  // (2) every agent advances within its budget.
  std::vector<std::vector<StepRecord>> records(n);
  std::vector<std::size_t> performed_before(n);
  for (std::size_t i = 0; i < n; ++i) performed_before[i] = s.engines[i].state().performed.size();

  auto advance = [&](std::size_t i) {
    for (std::size_t b = 0; b < c.step_budget; ++b) {
      auto r = s.engines[i].step();
      if (!r) break;
      records[i].push_back(std::move(*r));
    }
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) advance(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) advance(i);
  }

  s.last_tick_steps = 0;
  for (auto& rs : records) {
    s.last_tick_steps += rs.size();
    for (auto& r : rs) s.trace.push_back(std::move(r));
  }

  // (3) broadcast this tick's actions to the other agents for the next tick.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& log = s.engines[i].state().performed;
    for (std::size_t k = performed_before[i]; k < log.size(); ++k) {
      const std::string& action = log[k].action;
      s.broadcasts.push_back({c.agents[i].name, action, s.tick});
      bool observed = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (auto ev = c.mapping.route(c.agents[i], action, c.agents[j])) {
          s.inbox[j].push_back({s.tick + 1, *ev, c.agents[i].name});
          observed = true;
        }
      }
      if (!observed && n > 1)
        s.warnings.push_back("tick " + std::to_string(s.tick) + ": action '" + action + "' of " + c.agents[i].name +
                             " is not observed by any other agent");
    }
  }
  ++s.tick;
}

bool system_quiescent(const SystemState& s, const SystemConfig& c) {
  if (s.last_tick_steps != 0 || s.script_cursor < c.script.size()) return false;
  return std::all_of(s.inbox.begin(), s.inbox.end(), [](const auto& b) { return b.empty(); });
}

SystemRunResult run_system(const SystemConfig& c, Execution exec) {
  SystemRunResult res{make_system_state(c), false};
  for (;;) {
    if (std::any_of(res.state.engines.begin(), res.state.engines.end(), [](const Engine& e) { return e.exhausted(); })) {
      res.truncated = true;
      break;
    }
    if (res.state.tick >= c.max_ticks) {
      res.truncated = true;
      break;
    }
    system_tick(res.state, c, exec);
    if (system_quiescent(res.state, c)) break;
  }
  return res;
}

// ---------------------------------------------------------------------------

bool operator==(const InitialSituation& a, const InitialSituation& b) { return a.events == b.events; }

namespace {

InitialSituation normalized(std::vector<Atom> events) {
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return {std::move(events)};
}

}  // namespace

EvolutionTrace evolve_system(const SystemConfig& c, const std::vector<InitialSituation>& init,
                             const std::vector<ClauseFilter>& filters, Execution exec) {
  const std::size_t n = c.agents.size();
  EvolutionTrace trace;

  // Step 1 happens per round below; unit clauses start from `init`.
  std::vector<InitialSituation> units(n);
  for (std::size_t i = 0; i < n && i < init.size(); ++i) units[i] = normalized(init[i].events);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& e : units[i].events)
      if (!c.agents[i].is_event(e.name))
        throw std::invalid_argument("initial event '" + to_string(e) + "' is not a declared event of " +
                                    c.agents[i].name);

  for (std::size_t round = 0; round < c.max_evolution_rounds; ++round) {
    EvolutionRound r;
    r.units = units;
    r.programs.resize(n);
    r.models.resize(n);

    // Steps 1-3: P'_i, P'_i(R), M_i. Agents are independent.
    auto compute = [&](std::size_t i) {
      TransformedProgram tp = transform_program(c.agents[i], units[i]);
      if (i < filters.size() && filters[i]) tp = restrict_by_strategy(tp, filters[i]);
      r.models[i] = least_model(tp);
      r.programs[i] = std::move(tp);
    };
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) compute(static_cast<std::size_t>(i));
    } else {
      for (std::size_t i = 0; i < n; ++i) compute(i);
    }

    // Step 4: read the next unit clauses off the models.
    std::vector<std::vector<Atom>> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const AgentProgram& p = c.agents[i];
      for (const auto& atom : r.models[i]) {
        if (p.is_internal(atom)) next[i].emplace_back(atom);
        if (atom.starts_with("past_") && p.is_event(atom.substr(5))) next[i].push_back(Atom::past(atom.substr(5)));
        if (p.is_action(atom))
          for (std::size_t j = 0; j < n; ++j)
            if (auto ev = c.mapping.route(p, atom, c.agents[j])) next[j].emplace_back(*ev);
      }
    }
    std::vector<InitialSituation> next_units(n);
    for (std::size_t i = 0; i < n; ++i) next_units[i] = normalized(std::move(next[i]));

    trace.rounds.push_back(std::move(r));
    if (next_units == units) {
      trace.fixpoint = true;
      return trace;
    }
    units = std::move(next_units);
  }
  trace.truncated = true;
  return trace;
}

}  // namespace dali
