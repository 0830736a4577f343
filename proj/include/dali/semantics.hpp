#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dali/program.hpp"

namespace dali {

/// A plain propositional Horn clause over the extended alphabet, where
/// `past(e)` and `now(e)` become the atoms `past_e` and `now_e`.
struct HornClause {
  std::string head;
  std::vector<std::string> body;

  bool operator==(const HornClause&) const = default;
};

enum class TransformRule {
  ordinary,        // passed through unchanged
  reactive,        // e :- e, r1..rq
  past,            // past_e :- e, r1..rq
  action,          // a :- b, d1..dh, c1..cs
  action_support,  // b :- d1..dh, c1..cs  (actions in the body replaced by their preconditions)
  initial_event,   // e.  now_e.  past_e.
};

std::string_view to_string(TransformRule r);

struct Provenance {
  std::optional<std::size_t> source;  // index of the originating clause, if any
  TransformRule rule = TransformRule::ordinary;

  bool operator==(const Provenance&) const = default;
};

struct TransformedProgram {
  std::string agent;
  std::vector<HornClause> clauses;
  std::vector<Provenance> provenance;  // parallel to clauses

  bool operator==(const TransformedProgram&) const = default;
};

using HerbrandModel = std::set<std::string>;

/// Events true at the beginning: plain external/internal events, or past(e).
struct InitialSituation {
  std::vector<Atom> events;
};

/// Parses a comma-separated list such as `alarm,past(call)`.
InitialSituation parse_initial_situation(std::string_view csv);

/// Name of `a` in the extended alphabet: `p`, `past_p`, `now_p`.
std::string extended_name(const Atom& a);

/// Rewrites a validated program into an ordinary Horn program:
///   - reactive rule `e :> r..` becomes `e :- e, r..` and `past_e :- e, r..`;
///   - for every action `a` in the body of a non-past clause `b :- d.., a..`,
///     adds `a :- b, d.., c..` where `c..` are the preconditions of `a`
///     (empty without an action rule); action rules themselves are dropped;
///   - a clause with actions in its body also gets `b :- d.., c..` unless `b`
///     occurs among its own conditions;
///   - each initial event adds `e.` and `now_e.` (or `past_e.` for past events).
/// Throws std::invalid_argument when an initial event is not a declared event.
TransformedProgram transform_program(const AgentProgram& p, const InitialSituation& init);

enum class Execution { serial, parallel };

/// Least fixpoint of the immediate-consequence operator. The serial path is a
/// counter-based propagation, linear in program size; the parallel path
/// evaluates whole rounds of the operator with OpenMP.
HerbrandModel least_model(const std::vector<HornClause>& clauses, Execution exec = Execution::serial);
HerbrandModel least_model(const TransformedProgram& tp, Execution exec = Execution::serial);

using ClauseFilter = std::function<bool(const HornClause&, const Provenance&)>;

/// Keeps only the clauses a resolution strategy would select.
TransformedProgram restrict_by_strategy(const TransformedProgram& tp, const ClauseFilter& keep);

HerbrandModel snapshot(const AgentProgram& p, const InitialSituation& init, const ClauseFilter& keep = {},
                       Execution exec = Execution::serial);

/// `.dali`-compatible listing with one provenance comment per clause.
std::string print_transformed(const TransformedProgram& tp);

}  // namespace dali
