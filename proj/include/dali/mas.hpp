#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "dali/engine.hpp"
#include "dali/parser.hpp"
#include "dali/program.hpp"
#include "dali/semantics.hpp"

namespace dali {

/// How an action performed by one agent is seen by another. Without an entry
/// a consumer sees the action under its own name, provided it declares that
/// name as an external event.
class ChannelMapping {
 public:
  void add(const std::string& producer, const std::string& action, const std::string& consumer,
           const std::string& event);

  /// Event delivered to `consumer`, or nullopt when it does not observe the action.
  std::optional<std::string> route(const AgentProgram& producer, const std::string& action,
                                   const AgentProgram& consumer) const;

  const auto& entries() const { return entries_; }

 private:
  std::map<std::tuple<std::string, std::string, std::string>, std::string> entries_;
};

struct SystemConfig {
  std::vector<AgentProgram> agents;  // in declaration order
  EventScript script;
  ChannelMapping mapping;
  std::map<std::string, Strategy> strategies;  // agents without an entry use Strategy{}
  std::size_t max_ticks = 100;
  std::size_t max_evolution_rounds = 16;
  std::size_t step_budget = 50;  // engine steps per agent per tick

  std::optional<std::size_t> find(std::string_view agent) const;
  Strategy strategy_for(std::string_view agent) const;
};

/// Structural problems: duplicate names, invalid programs, script or mapping
/// entries that name unknown agents or undeclared events.
std::vector<std::string> validate_config(const SystemConfig& c);

using FileLoader = std::function<std::string(const std::string&)>;

/// Parses a system file:
///   agent <file>        script <file>        max_ticks N
///   map <producer>.<action> -> <consumer>.<event>
/// `#` and `%` start comments. Relative paths resolve against `base_dir`.
SystemConfig parse_system_config(std::string_view text, const std::string& base_dir, const FileLoader& load,
                                 std::string_view file = "<system>");

SystemConfig load_system_config(const std::string& path);

struct Delivery {
  std::size_t tick = 0;  // tick at which the event becomes available
  std::string event;
  std::string source;    // producer agent, or "script"

  bool operator==(const Delivery&) const = default;
};

struct BroadcastRecord {
  std::string producer;
  std::string action;
  std::size_t tick = 0;

  bool operator==(const BroadcastRecord&) const = default;
};

struct SystemState {
  std::vector<Engine> engines;  // parallel to SystemConfig::agents
  std::vector<std::vector<Delivery>> inbox;          // not yet injected
  std::vector<std::vector<Delivery>> inbox_history;  // everything ever delivered
  std::size_t tick = 0;
  std::size_t script_cursor = 0;
  std::size_t last_tick_steps = 0;
  std::vector<BroadcastRecord> broadcasts;
  std::vector<std::string> warnings;
  std::vector<StepRecord> trace;
};

SystemState make_system_state(const SystemConfig& c);

/// One tick: deliver due script entries and broadcasts, advance every agent by
/// at most `step_budget` steps, then route the actions performed this tick to
/// the other agents for the next tick. The parallel path advances agents
/// concurrently and produces the same state and trace as the serial one.
void system_tick(SystemState& s, const SystemConfig& c, Execution exec = Execution::serial);

/// True when the last tick did nothing and nothing is left to deliver.
bool system_quiescent(const SystemState& s, const SystemConfig& c);

struct SystemRunResult {
  SystemState state;
  bool truncated = false;
};

SystemRunResult run_system(const SystemConfig& c, Execution exec = Execution::serial);

struct EvolutionRound {
  std::vector<InitialSituation> units;  // per agent, sorted
  std::vector<TransformedProgram> programs;
  std::vector<HerbrandModel> models;
};

struct EvolutionTrace {
  std::vector<EvolutionRound> rounds;
  bool fixpoint = false;
  bool truncated = false;
};

/// Iterates snapshot models of all agents. Each round builds every P'_i from
/// the current unit clauses, restricts it with filters[i] (when given) and
/// computes M_i. The next round's unit clauses are read off the models:
/// actions of agent i become external events of every other agent that
/// observes them, internal and past events of agent i stay with agent i.
/// Stops when the unit clauses repeat or after max_evolution_rounds.
EvolutionTrace evolve_system(const SystemConfig& c, const std::vector<InitialSituation>& init = {},
                             const std::vector<ClauseFilter>& filters = {}, Execution exec = Execution::serial);

bool operator==(const InitialSituation& a, const InitialSituation& b);

}  // namespace dali
