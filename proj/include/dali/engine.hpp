#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dali/parser.hpp"
#include "dali/program.hpp"

namespace dali {

/// The six resolution steps an agent can take.
///   i    SLD step on a subgoal with a defining clause (also past(e) tests)
///   ii   preconditionless action, or completion of a nested subproof
///   iii  now(e) test against a pending external event
///   iv   react to a pending external event
///   v    react to a pending internal event
///   vi   attempt an internal event as a new component goal
enum class Case { i, ii, iii, iv, v, vi };

std::string_view to_string(Case c);

enum class Origin { query, external_reaction, internal_reaction, internal_attempt };

std::string_view to_string(Origin o);

/// One subgoal inside a component goal.
struct GoalAtom {
  enum class Kind {
    prove,     // ordinary subgoal
    react,     // root of a reaction component; resolved only by the reactive rule
    nest_end,  // closes the nested subproof of `atom` (an internal event or action)
  };

  Atom atom;
  Kind kind = Kind::prove;
  std::vector<std::string> ancestors;     // sorted plain atoms on the resolution path
  std::optional<std::string> nest_owner;  // innermost nested subproof this atom belongs to

  bool operator==(const GoalAtom&) const = default;
};

std::string to_string(const GoalAtom& g);

enum class Status { active, succeeded, failed };

std::string_view to_string(Status s);

/// Saved resolvent for chronological backtracking within one component.
struct ChoicePoint {
  std::vector<GoalAtom> atoms;
  std::vector<std::size_t> alternatives;  // untried clause indices, program order
};

/// One conjunctive goal of the overall disjunctive goal.
struct ComponentGoal {
  std::vector<GoalAtom> atoms;
  Origin origin = Origin::query;
  std::string trigger;                 // query atom, event or internal event that created it
  std::optional<std::string> nesting;  // owner for internal attempts
  Status status = Status::active;
  std::vector<ChoicePoint> choices;

  bool steppable() const { return status == Status::active && !atoms.empty(); }
};

using GoalState = std::vector<ComponentGoal>;

struct PerformedAction {
  std::string action;
  std::size_t step = 0;

  bool operator==(const PerformedAction&) const = default;
};

struct AgentState {
  std::vector<std::string> ev;  // pending external events, FIFO by arrival
  std::vector<std::string> iv;  // pending internal events, FIFO by derivation
  std::set<std::string> pv;     // events reacted to at least once
  std::vector<PerformedAction> performed;

  std::size_t arrivals = 0;   // injections that entered EV
  std::size_t coalesced = 0;  // injections merged into an already pending instance
  std::size_t consumed = 0;   // case (iv) reactions
  std::size_t epoch = 0;      // bumped whenever EV changes

  bool has_ev(std::string_view e) const;
  bool has_iv(std::string_view e) const;

  bool operator==(const AgentState&) const = default;
};

/// Scheduling policy. Steps are numbered by a clock s = 0, 1, ...
///   - when s % internal_check_period == 0, react to the oldest internal event
///     (case v) or else attempt the next eligible internal event (case vi);
///   - an external event that has waited event_check_period steps is reacted
///     to (case iv);
///   - otherwise component goals advance round-robin with leftmost selection,
///     program-order clause choice and chronological backtracking;
///   - when no component can move, pending internal work waits for the next
///     internal slot, then pending external events are reacted to.
struct Strategy {
  std::size_t event_check_period = 8;
  std::size_t internal_check_period = 2;
  std::size_t max_steps = 10000;
  std::uint64_t seed = 0;  // reserved for randomized strategies

  bool operator==(const Strategy&) const = default;
};

struct StateSnapshot {
  std::vector<std::string> ev;
  std::vector<std::string> iv;
  std::vector<std::string> pv;  // sorted

  bool operator==(const StateSnapshot&) const = default;
};

StateSnapshot snapshot_of(const AgentState& s);

struct StepRecord {
  std::size_t step = 0;
  Case kase = Case::i;
  std::string agent;
  std::string selected;
  std::size_t component = 0;
  std::vector<std::string> resulting_goal;  // component goal after the step
  StateSnapshot before;
  StateSnapshot after;
  std::optional<std::string> performed;
  bool nest_completion = false;

  bool operator==(const StepRecord&) const = default;
};

/// One line of the line-delimited JSON trace. Field set and order are fixed:
/// step, case, agent, selected, component, ev, iv, pv, performed.
std::string trace_line(const StepRecord& r);

/// Returns a description of every way `r` breaks the EV/IV/PV delta contract
/// of its case label; empty when the record is consistent.
std::vector<std::string> contract_violations(const StepRecord& r);

class ProgramError : public std::runtime_error {
 public:
  explicit ProgramError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

// Resolution primitives. Each applies one case of the extended resolution to
// an explicit goal and state; the Engine composes them under a Strategy.

/// Case (i): replace atom `atom` of component `comp` by the body of clause
/// `clause`. Returns false (branch failure) when the clause does not define the
/// atom or the atom repeats one of its ancestors.
bool sld_step(const AgentProgram& p, GoalState& g, std::size_t comp, std::size_t atom, std::size_t clause);

/// Case (ii): remove a preconditionless action, log it, and add it to IV when
/// it is also an internal event.
void action_step(const AgentProgram& p, GoalState& g, AgentState& s, std::size_t comp, std::size_t atom,
                 std::size_t step);

/// Case (iii): remove `now(e)` when e is pending. Returns false otherwise.
bool present_event_step(GoalState& g, std::size_t comp, std::size_t atom, const AgentState& s);

/// `past(e)` succeeds iff e is in PV; no state change.
bool past_event_step(GoalState& g, std::size_t comp, std::size_t atom, const AgentState& s);

/// Closes a nested subproof: actions are performed, internal events enter IV.
/// Returns the performed action, if any.
std::optional<std::string> nest_completion_step(const AgentProgram& p, GoalState& g, AgentState& s,
                                                std::size_t comp, std::size_t atom, std::size_t step);

/// Case (iv): consume the oldest pending external event into PV and append a
/// reaction component. The component fails at once when the event has no
/// reactive rule. Returns the new component index.
std::size_t external_reaction_step(const AgentProgram& p, GoalState& g, AgentState& s);

/// Case (v): as case (iv) for the oldest pending internal event.
std::size_t internal_reaction_step(const AgentProgram& p, GoalState& g, AgentState& s);

/// Case (vi): append a component attempting internal event `atom`.
std::size_t internal_attempt_step(const AgentProgram& p, GoalState& g, const std::string& atom);

struct ComponentOutcome {
  std::size_t index = 0;
  Origin origin = Origin::query;
  std::string trigger;
  Status status = Status::active;

  bool operator==(const ComponentOutcome&) const = default;
};

/// One agent's interpreter. Owns its goal and state; not shared between threads.
class Engine {
 public:
  /// Throws ProgramError when the program does not validate.
  explicit Engine(AgentProgram program, Strategy strategy = {});

  const AgentProgram& program() const { return program_; }
  const Strategy& strategy() const { return strategy_; }
  const AgentState& state() const { return state_; }
  const GoalState& goal() const { return goal_; }

  /// Makes external event `event` available. Repeated arrivals while the event
  /// is pending are coalesced. Throws std::invalid_argument for undeclared events.
  void inject(const std::string& event);

  /// Adds a query component; returns its index.
  std::size_t add_query(const Atom& goal);

  /// Performs one resolution step; nullopt when nothing is applicable or the
  /// step budget is spent.
  std::optional<StepRecord> step();

  bool exhausted() const { return clock_ >= strategy_.max_steps; }
  std::size_t clock() const { return clock_; }
  std::size_t attempts(const std::string& internal) const;

  std::vector<ComponentOutcome> outcomes() const;

 private:
  bool attempt_eligible(const std::string& atom) const;
  std::optional<std::string> next_eligible_attempt() const;
  std::optional<StepRecord> component_step(std::size_t comp);
  std::optional<StepRecord> round_robin();
  StepRecord begin_record(Case c, std::string selected, std::size_t comp) const;
  StepRecord finish(StepRecord r);

  AgentProgram program_;
  Strategy strategy_;
  GoalState goal_;
  AgentState state_;
  std::size_t clock_ = 0;
  std::size_t ev_waiting_since_ = 0;
  std::size_t cursor_ = 0;  // next component to consider
  std::size_t attempt_cursor_ = 0;
  std::map<std::string, std::size_t> last_attempt_epoch_;
  std::map<std::string, std::size_t> attempt_count_;
};

struct RunResult {
  AgentState state;
  std::vector<StepRecord> trace;
  std::vector<ComponentOutcome> outcomes;
  std::optional<bool> query_succeeded;  // set when a query was given
  bool truncated = false;
};

struct RunOptions {
  std::size_t steps_per_tick = 50;
};

/// Drives one agent: injects inbox entries at their ticks (entries addressed to
/// other agents are ignored) and steps until quiescence or the step budget.
RunResult run(const AgentProgram& program, const std::optional<Atom>& query, const EventScript& inbox,
              const Strategy& strategy = {}, const RunOptions& options = {});

}  // namespace dali
