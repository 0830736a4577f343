#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dali/atom.hpp"

namespace dali {

/// `:-` ordinary rule or fact, `:>` reactive rule, `:<` action rule.
enum class ClauseKind { ordinary, reactive, action };

std::string_view to_string(ClauseKind k);

struct Clause {
  std::string head;
  std::vector<Atom> body;
  ClauseKind kind = ClauseKind::ordinary;

  bool is_fact() const { return kind == ClauseKind::ordinary && body.empty(); }
  bool operator==(const Clause&) const = default;
};

/// One agent: its clauses in program order plus the declared role sets.
struct AgentProgram {
  std::string name;
  std::vector<Clause> clauses;
  NameSet externals;  // E_Ag
  NameSet internals;  // I_Ag
  NameSet actions;    // A_Ag

  bool is_external(std::string_view a) const { return externals.contains(a); }
  bool is_internal(std::string_view a) const { return internals.contains(a); }
  bool is_action(std::string_view a) const { return actions.contains(a); }
  bool is_event(std::string_view a) const { return is_external(a) || is_internal(a); }

  /// Index of the reactive clause for `event`, if any.
  std::optional<std::size_t> reactive_clause(std::string_view event) const;
  /// Index of the action rule (preconditions) for `action`, if any.
  std::optional<std::size_t> action_clause(std::string_view action) const;

  /// Clauses usable to prove `head` as an ordinary subgoal: ordinary clauses
  /// and the action rule, in program order. Reactive clauses are excluded;
  /// they fire only on reaction components.
  std::vector<std::size_t> defining_clauses(std::string_view head) const;

  /// Base atoms that appear under `past(..)` somewhere in a body (EP_Ag).
  std::set<std::string> past_event_atoms() const;
  /// Base atoms that appear under `now(..)` somewhere in a body (EN_Ag).
  std::set<std::string> present_event_atoms() const;

  bool operator==(const AgentProgram&) const = default;
};

enum class Rule {
  head_role,          // clause kind incompatible with the head's declared role
  empty_body,         // reactive/action clause without conditions
  duplicate_reactive, // more than one reactive clause for an event
  duplicate_action,   // more than one action rule for an action
  external_in_body,   // external event used plain in a body
  marker_target,      // past/now applied to an atom of the wrong role
  role_conflict,      // an atom declared with incompatible roles
  bad_name,           // empty or malformed identifier
};

std::string_view to_string(Rule r);

struct ValidationError {
  std::optional<std::size_t> clause;  // absent for declaration-level errors
  Rule rule;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationError> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

/// Checks every structural restriction on reactive rules, action rules and
/// event markers. Violations are reported as data, never thrown.
ValidationReport validate_program(const AgentProgram& p);

}  // namespace dali
