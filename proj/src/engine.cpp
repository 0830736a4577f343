#include "dali/engine.hpp"

#include <algorithm>

namespace dali {

std::string_view to_string(Case c) {
  switch (c) {
    case Case::i:
      return "i";
    case Case::ii:
      return "ii";
    case Case::iii:
      return "iii";
    case Case::iv:
      return "iv";
    case Case::v:
      return "v";
    case Case::vi:
      return "vi";
  }
  return "?";
}

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::query:
      return "query";
    case Origin::external_reaction:
      return "external-reaction";
    case Origin::internal_reaction:
      return "internal-reaction";
    case Origin::internal_attempt:
      return "internal-attempt";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::active:
      return "active";
    case Status::succeeded:
      return "succeeded";
    case Status::failed:
      return "failed";
  }
  return "?";
}

std::string to_string(const GoalAtom& g) {
  switch (g.kind) {
    case GoalAtom::Kind::react:
      return g.atom.name + "!";
    case GoalAtom::Kind::nest_end:
      return "()_" + g.atom.name;
    case GoalAtom::Kind::prove:
      break;
  }
  return to_string(g.atom);
}

bool AgentState::has_ev(std::string_view e) const { return std::find(ev.begin(), ev.end(), e) != ev.end(); }
bool AgentState::has_iv(std::string_view e) const { return std::find(iv.begin(), iv.end(), e) != iv.end(); }

StateSnapshot snapshot_of(const AgentState& s) { return {s.ev, s.iv, {s.pv.begin(), s.pv.end()}}; }

namespace {

std::string describe_report(const ValidationReport& r) {
  std::string msg = "program does not validate";
  for (const auto& e : r.errors) msg += "\n  " + std::string(to_string(e.rule)) + ": " + e.message;
  return msg;
}

GoalAtom& selected(GoalState& g, std::size_t comp, std::size_t atom) {
  if (comp >= g.size() || atom >= g[comp].atoms.size()) throw std::out_of_range("no such goal atom");
  return g[comp].atoms[atom];
}

void settle(ComponentGoal& c) {
  if (c.status == Status::active && c.atoms.empty()) c.status = Status::succeeded;
}

void erase_atom(GoalState& g, std::size_t comp, std::size_t atom) {
  auto& atoms = g[comp].atoms;
  atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(atom));
  settle(g[comp]);
}

void add_internal(AgentState& s, const std::string& e) {
  if (!s.has_iv(e)) s.iv.push_back(e);
}

std::vector<std::string> render(const std::vector<GoalAtom>& atoms) {
  std::vector<std::string> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(to_string(a));
  return out;
}

}  // namespace

ProgramError::ProgramError(ValidationReport report)
    : std::runtime_error(describe_report(report)), report_(std::move(report)) {}

bool sld_step(const AgentProgram& p, GoalState& g, std::size_t comp, std::size_t atom, std::size_t clause) {
  const GoalAtom sel = selected(g, comp, atom);
  if (clause >= p.clauses.size()) return false;
  const Clause& c = p.clauses[clause];
  if (!sel.atom.is_plain() || c.head != sel.atom.name) return false;

  switch (sel.kind) {
    case GoalAtom::Kind::react:
      if (c.kind != ClauseKind::reactive) return false;
      break;
    case GoalAtom::Kind::prove:
      if (c.kind == ClauseKind::reactive) return false;
      if (std::binary_search(sel.ancestors.begin(), sel.ancestors.end(), sel.atom.name)) return false;
      break;
    case GoalAtom::Kind::nest_end:
      return false;
  }

  std::vector<std::string> ancestors = sel.ancestors;
  ancestors.insert(std::upper_bound(ancestors.begin(), ancestors.end(), sel.atom.name), sel.atom.name);
  ancestors.erase(std::unique(ancestors.begin(), ancestors.end()), ancestors.end());

  // Internal events and actions with preconditions are proved as nested
  // subgoals so that completing them can be observed.
  const bool nested = c.kind == ClauseKind::action ||
                      (sel.kind == GoalAtom::Kind::prove && p.is_internal(sel.atom.name));

  std::vector<GoalAtom> replacement;
  replacement.reserve(c.body.size() + 1);
  for (const Atom& b : c.body)
    replacement.push_back({b, GoalAtom::Kind::prove, ancestors, nested ? std::optional(sel.atom.name) : sel.nest_owner});
  if (nested) replacement.push_back({sel.atom, GoalAtom::Kind::nest_end, sel.ancestors, sel.nest_owner});

  auto& atoms = g[comp].atoms;
  atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(atom));
  atoms.insert(atoms.begin() + static_cast<std::ptrdiff_t>(atom), replacement.begin(), replacement.end());
  settle(g[comp]);
  return true;
}

void action_step(const AgentProgram& p, GoalState& g, AgentState& s, std::size_t comp, std::size_t atom,
                 std::size_t step) {
  const GoalAtom& sel = selected(g, comp, atom);
  if (sel.kind != GoalAtom::Kind::prove || !sel.atom.is_plain() || !p.is_action(sel.atom.name) ||
      p.action_clause(sel.atom.name))
    throw std::logic_error("action_step needs an action without an action rule");
  const std::string name = sel.atom.name;
  s.performed.push_back({name, step});
  if (p.is_internal(name)) add_internal(s, name);
  erase_atom(g, comp, atom);
}

bool present_event_step(GoalState& g, std::size_t comp, std::size_t atom, const AgentState& s) {
  const GoalAtom& sel = selected(g, comp, atom);
  if (sel.atom.marker != Marker::present || !s.has_ev(sel.atom.name)) return false;
  erase_atom(g, comp, atom);
  return true;
}

bool past_event_step(GoalState& g, std::size_t comp, std::size_t atom, const AgentState& s) {
  const GoalAtom& sel = selected(g, comp, atom);
  if (sel.atom.marker != Marker::past || !s.pv.contains(sel.atom.name)) return false;
  erase_atom(g, comp, atom);
  return true;
}

std::optional<std::string> nest_completion_step(const AgentProgram& p, GoalState& g, AgentState& s,
                                                std::size_t comp, std::size_t atom, std::size_t step) {
  const GoalAtom& sel = selected(g, comp, atom);
  if (sel.kind != GoalAtom::Kind::nest_end) throw std::logic_error("nest_completion_step needs a nest end");
  const std::string owner = sel.atom.name;
  std::optional<std::string> performed;
  if (p.is_action(owner)) {
    s.performed.push_back({owner, step});
    performed = owner;
  }
  if (p.is_internal(owner)) add_internal(s, owner);
  erase_atom(g, comp, atom);
  return performed;
}

namespace {

std::size_t join_reaction(const AgentProgram& p, GoalState& g, const std::string& event, Origin origin) {
  ComponentGoal c;
  c.origin = origin;
  c.trigger = event;
  c.atoms.push_back({Atom(event), GoalAtom::Kind::react, {}, std::nullopt});
  if (!p.reactive_clause(event)) c.status = Status::failed;
  g.push_back(std::move(c));
  return g.size() - 1;
}

}  // namespace

std::size_t external_reaction_step(const AgentProgram& p, GoalState& g, AgentState& s) {
  if (s.ev.empty()) throw std::logic_error("external_reaction_step needs a pending event");
  const std::string e = s.ev.front();
  s.ev.erase(s.ev.begin());
  s.pv.insert(e);
  ++s.consumed;
  ++s.epoch;
  return join_reaction(p, g, e, Origin::external_reaction);
}

std::size_t internal_reaction_step(const AgentProgram& p, GoalState& g, AgentState& s) {
  if (s.iv.empty()) throw std::logic_error("internal_reaction_step needs a pending internal event");
  const std::string e = s.iv.front();
  s.iv.erase(s.iv.begin());
  s.pv.insert(e);
  return join_reaction(p, g, e, Origin::internal_reaction);
}

std::size_t internal_attempt_step(const AgentProgram& p, GoalState& g, const std::string& atom) {
  if (!p.is_internal(atom)) throw std::logic_error("internal_attempt_step needs a declared internal event");
  ComponentGoal c;
  c.origin = Origin::internal_attempt;
  c.trigger = atom;
  c.nesting = atom;
  c.atoms.push_back({Atom(atom), GoalAtom::Kind::prove, {}, std::nullopt});
  g.push_back(std::move(c));
  return g.size() - 1;
}

// ---------------------------------------------------------------------------

Engine::Engine(AgentProgram program, Strategy strategy) : program_(std::move(program)), strategy_(strategy) {
  if (auto rep = validate_program(program_); !rep.ok()) throw ProgramError(std::move(rep));
  if (strategy_.event_check_period == 0 || strategy_.internal_check_period == 0)
    throw std::invalid_argument("strategy periods must be at least 1");
}

void Engine::inject(const std::string& event) {
  if (!program_.is_external(event))
    throw std::invalid_argument("'" + event + "' is not an external event of agent " + program_.name);
  if (state_.has_ev(event)) {
    ++state_.coalesced;
    return;
  }
  if (state_.ev.empty()) ev_waiting_since_ = clock_;
  state_.ev.push_back(event);
  ++state_.arrivals;
  ++state_.epoch;
}

std::size_t Engine::add_query(const Atom& goal) {
  ComponentGoal c;
  c.origin = Origin::query;
  c.trigger = to_string(goal);
  c.atoms.push_back({goal, GoalAtom::Kind::prove, {}, std::nullopt});
  goal_.push_back(std::move(c));
  return goal_.size() - 1;
}

std::size_t Engine::attempts(const std::string& internal) const {
  auto it = attempt_count_.find(internal);
  return it == attempt_count_.end() ? 0 : it->second;
}

bool Engine::attempt_eligible(const std::string& atom) const {
  // Attempting an action would perform it; actions enter IV only when performed.
  if (program_.is_action(atom) || state_.has_iv(atom)) return false;
  for (const auto& c : goal_)
    if (c.status == Status::active && c.origin == Origin::internal_attempt && c.trigger == atom) return false;
  auto it = last_attempt_epoch_.find(atom);
  return it == last_attempt_epoch_.end() || it->second != state_.epoch;
}

std::optional<std::string> Engine::next_eligible_attempt() const {
  const auto& items = program_.internals.items();
  for (std::size_t k = 0; k < items.size(); ++k) {
    const std::string& a = items[(attempt_cursor_ + k) % items.size()];
    if (attempt_eligible(a)) return a;
  }
  return std::nullopt;
}

std::vector<ComponentOutcome> Engine::outcomes() const {
  std::vector<ComponentOutcome> out;
  for (std::size_t i = 0; i < goal_.size(); ++i)
    out.push_back({i, goal_[i].origin, goal_[i].trigger, goal_[i].status});
  return out;
}

StepRecord Engine::begin_record(Case c, std::string sel, std::size_t comp) const {
  StepRecord r;
  r.step = clock_;
  r.kase = c;
  r.agent = program_.name;
  r.selected = std::move(sel);
  r.component = comp;
  r.before = snapshot_of(state_);
  return r;
}

StepRecord Engine::finish(StepRecord r) {
  r.resulting_goal = render(goal_[r.component].atoms);
  r.after = snapshot_of(state_);
  ++clock_;
  return r;
}

std::optional<StepRecord> Engine::component_step(std::size_t comp) {
  ComponentGoal& c = goal_[comp];
  const GoalAtom head = c.atoms.front();

  switch (head.kind) {
    case GoalAtom::Kind::nest_end: {
      StepRecord r = begin_record(Case::ii, head.atom.name, comp);
      r.nest_completion = true;
      r.performed = nest_completion_step(program_, goal_, state_, comp, 0, clock_);
      return finish(std::move(r));
    }
    case GoalAtom::Kind::react: {
      StepRecord r = begin_record(Case::i, head.atom.name, comp);
      if (auto rc = program_.reactive_clause(head.atom.name); rc && sld_step(program_, goal_, comp, 0, *rc))
        return finish(std::move(r));
      break;
    }
    case GoalAtom::Kind::prove: {
      const Atom& a = head.atom;
      if (a.marker == Marker::present) {
        StepRecord r = begin_record(Case::iii, to_string(a), comp);
        if (present_event_step(goal_, comp, 0, state_)) return finish(std::move(r));
        break;
      }
      if (a.marker == Marker::past) {
        StepRecord r = begin_record(Case::i, to_string(a), comp);
        if (past_event_step(goal_, comp, 0, state_)) return finish(std::move(r));
        break;
      }
      if (program_.is_action(a.name) && !program_.action_clause(a.name)) {
        StepRecord r = begin_record(Case::ii, a.name, comp);
        action_step(program_, goal_, state_, comp, 0, clock_);
        r.performed = a.name;
        return finish(std::move(r));
      }
      if (std::binary_search(head.ancestors.begin(), head.ancestors.end(), a.name)) break;
      std::vector<std::size_t> candidates = program_.defining_clauses(a.name);
      if (candidates.empty()) break;
      if (candidates.size() > 1)
        c.choices.push_back({c.atoms, std::vector<std::size_t>(candidates.begin() + 1, candidates.end())});
      StepRecord r = begin_record(Case::i, a.name, comp);
      sld_step(program_, goal_, comp, 0, candidates.front());
      return finish(std::move(r));
    }
  }

  // Branch failure: retry the most recent alternative, or fail the component.
  if (c.choices.empty()) {
    c.status = Status::failed;
    return std::nullopt;
  }
  ChoicePoint cp = std::move(c.choices.back());
  c.choices.pop_back();
  c.atoms = std::move(cp.atoms);
  const std::size_t clause = cp.alternatives.front();
  cp.alternatives.erase(cp.alternatives.begin());
  if (!cp.alternatives.empty()) c.choices.push_back({c.atoms, std::move(cp.alternatives)});
  StepRecord r = begin_record(Case::i, c.atoms.front().atom.name, comp);
  sld_step(program_, goal_, comp, 0, clause);
  return finish(std::move(r));
}

std::optional<StepRecord> Engine::round_robin() {
  const std::size_t n = goal_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = (cursor_ + k) % n;
    if (!goal_[idx].steppable()) continue;
    if (auto r = component_step(idx)) {
      cursor_ = idx + 1;
      return r;
    }
  }
  return std::nullopt;
}

std::optional<StepRecord> Engine::step() {
  const std::size_t m = strategy_.internal_check_period;
  const std::size_t k = strategy_.event_check_period;

  auto react_internal = [&] {
    StepRecord r = begin_record(Case::v, state_.iv.front(), goal_.size());
    internal_reaction_step(program_, goal_, state_);
    return finish(std::move(r));
  };
  auto attempt = [&](const std::string& a) {
    StepRecord r = begin_record(Case::vi, a, goal_.size());
    internal_attempt_step(program_, goal_, a);
    last_attempt_epoch_[a] = state_.epoch;
    ++attempt_count_[a];
    const auto& items = program_.internals.items();
    attempt_cursor_ = (std::find(items.begin(), items.end(), a) - items.begin() + 1) % items.size();
    return finish(std::move(r));
  };
  auto react_external = [&] {
    StepRecord r = begin_record(Case::iv, state_.ev.front(), goal_.size());
    external_reaction_step(program_, goal_, state_);
    ev_waiting_since_ = clock_ + 1;
    return finish(std::move(r));
  };

  while (!exhausted()) {
    if (clock_ % m == 0) {
      if (!state_.iv.empty()) return react_internal();
      if (auto a = next_eligible_attempt()) return attempt(*a);
    }
    if (!state_.ev.empty() && clock_ - ev_waiting_since_ >= k) return react_external();
    if (auto r = round_robin()) return r;
    if (!state_.iv.empty() || next_eligible_attempt()) {
      clock_ = (clock_ / m + 1) * m;  // idle until the next internal slot
      continue;
    }
    if (!state_.ev.empty()) return react_external();
    return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

RunResult run(const AgentProgram& program, const std::optional<Atom>& query, const EventScript& inbox,
              const Strategy& strategy, const RunOptions& options) {
  Engine engine(program, strategy);
  std::size_t query_index = 0;
  if (query) query_index = engine.add_query(*query);

  EventScript mine;
  for (const auto& e : inbox)
    if (e.agent == program.name) mine.push_back(e);

  RunResult res;
  std::size_t next = 0;
  std::size_t tick = 0;
  for (;;) {
    while (next < mine.size() && mine[next].tick <= tick) engine.inject(mine[next++].event);
    std::size_t produced = 0;
    for (; produced < options.steps_per_tick; ++produced) {
      auto r = engine.step();
      if (!r) break;
      res.trace.push_back(std::move(*r));
    }
    if (engine.exhausted()) {
      res.truncated = true;
      break;
    }
    if (produced < options.steps_per_tick) {
      if (next == mine.size()) break;  // quiescent with nothing left to arrive
      tick = std::max(tick + 1, mine[next].tick);
    } else {
      ++tick;
    }
  }

  res.state = engine.state();
  res.outcomes = engine.outcomes();
  if (query) {
    const Status st = engine.goal()[query_index].status;
    res.query_succeeded = st == Status::succeeded;
  }
  return res;
}

}  // namespace dali
