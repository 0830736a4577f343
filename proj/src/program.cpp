#include "dali/program.hpp"

#include <map>

namespace dali {

std::string to_string(const Atom& a) {
  switch (a.marker) {
    case Marker::past:
      return "past(" + a.name + ")";
    case Marker::present:
      return "now(" + a.name + ")";
    case Marker::plain:
      break;
  }
  return a.name;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s.front())) return false;
  for (char c : s)
    if (!alpha(c) && !digit(c)) return false;
  return true;
}

std::string_view to_string(ClauseKind k) {
  switch (k) {
    case ClauseKind::ordinary:
      return "ordinary";
    case ClauseKind::reactive:
      return "reactive";
    case ClauseKind::action:
      return "action";
  }
  return "?";
}

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::head_role:
      return "head-role";
    case Rule::empty_body:
      return "empty-body";
    case Rule::duplicate_reactive:
      return "one-reactive-rule";
    case Rule::duplicate_action:
      return "one-action-rule";
    case Rule::external_in_body:
      return "external-in-body";
    case Rule::marker_target:
      return "marker-target";
    case Rule::role_conflict:
      return "role-conflict";
    case Rule::bad_name:
      return "bad-name";
  }
  return "?";
}

std::optional<std::size_t> AgentProgram::reactive_clause(std::string_view event) const {
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (clauses[i].kind == ClauseKind::reactive && clauses[i].head == event) return i;
  return std::nullopt;
}

std::optional<std::size_t> AgentProgram::action_clause(std::string_view action) const {
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (clauses[i].kind == ClauseKind::action && clauses[i].head == action) return i;
  return std::nullopt;
}

std::vector<std::size_t> AgentProgram::defining_clauses(std::string_view head) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < clauses.size(); ++i)
    if (clauses[i].kind != ClauseKind::reactive && clauses[i].head == head) out.push_back(i);
  return out;
}

namespace {

std::set<std::string> marked_atoms(const AgentProgram& p, Marker m) {
  std::set<std::string> out;
  for (const auto& c : p.clauses)
    for (const auto& a : c.body)
      if (a.marker == m) out.insert(a.name);
  return out;
}

}  // namespace

std::set<std::string> AgentProgram::past_event_atoms() const { return marked_atoms(*this, Marker::past); }
std::set<std::string> AgentProgram::present_event_atoms() const {
  return marked_atoms(*this, Marker::present);
}

ValidationReport validate_program(const AgentProgram& p) {
  ValidationReport rep;
  auto error = [&](std::optional<std::size_t> idx, Rule r, std::string msg) {
    rep.errors.push_back({idx, r, std::move(msg)});
  };

  if (!is_identifier(p.name)) error(std::nullopt, Rule::bad_name, "agent name '" + p.name + "' is not an identifier");

  for (const auto& e : p.externals) {
    if (p.is_internal(e))
      error(std::nullopt, Rule::role_conflict, "'" + e + "' is declared both external and internal");
    if (p.is_action(e))
      error(std::nullopt, Rule::role_conflict, "'" + e + "' is declared both external and action");
  }

  std::map<std::string, std::size_t> reactive_seen;
  std::map<std::string, std::size_t> action_seen;

  for (std::size_t i = 0; i < p.clauses.size(); ++i) {
    const Clause& c = p.clauses[i];
    const std::string where = "clause " + std::to_string(i + 1) + " (" + c.head + ")";

    if (!is_identifier(c.head)) error(i, Rule::bad_name, where + ": head is not an identifier");

    switch (c.kind) {
      case ClauseKind::reactive:
        if (!p.is_event(c.head))
          error(i, Rule::head_role, where + ": reactive rule head must be a declared external or internal event");
        if (auto [it, fresh] = reactive_seen.emplace(c.head, i); !fresh)
          error(i, Rule::duplicate_reactive,
                where + ": only one reactive rule per event; first given at clause " + std::to_string(it->second + 1));
        break;
      case ClauseKind::action:
        if (!p.is_action(c.head)) error(i, Rule::head_role, where + ": action rule head must be a declared action");
        if (auto [it, fresh] = action_seen.emplace(c.head, i); !fresh)
          error(i, Rule::duplicate_action,
                where + ": only one action rule per action; first given at clause " + std::to_string(it->second + 1));
        break;
      case ClauseKind::ordinary:
        if (p.is_external(c.head))
          error(i, Rule::head_role, where + ": an external event may only head its reactive rule");
        if (p.is_action(c.head))
          error(i, Rule::head_role, where + ": an action may only head its action rule (use ':<')");
        break;
    }

    if (c.kind != ClauseKind::ordinary && c.body.empty())
      error(i, Rule::empty_body, where + ": " + std::string(to_string(c.kind)) + " rule needs at least one condition");

    for (const Atom& a : c.body) {
      if (!is_identifier(a.name)) {
        error(i, Rule::bad_name, where + ": body atom '" + a.name + "' is not an identifier");
        continue;
      }
      switch (a.marker) {
        case Marker::plain:
          if (p.is_external(a.name))
            error(i, Rule::external_in_body,
                  where + ": external event '" + a.name + "' may appear in a body only as past(..) or now(..)");
          break;
        case Marker::present:
          if (!p.is_external(a.name))
            error(i, Rule::marker_target, where + ": now(" + a.name + ") requires a declared external event");
          break;
        case Marker::past:
          if (!p.is_event(a.name))
            error(i, Rule::marker_target,
                  where + ": past(" + a.name + ") requires a declared external or internal event");
          break;
      }
    }
  }

  for (const auto& e : p.externals)
    if (!reactive_seen.contains(e)) rep.warnings.push_back("external event '" + e + "' has no reactive rule");
  for (const auto& e : p.internals)
    if (!reactive_seen.contains(e)) rep.warnings.push_back("internal event '" + e + "' has no reactive rule");
  for (const auto& c : p.clauses)
    if (c.head.starts_with("past_") || c.head.starts_with("now_"))
      rep.warnings.push_back("atom '" + c.head + "' may collide with names generated by the program transformation");

  return rep;
}

}  // namespace dali
