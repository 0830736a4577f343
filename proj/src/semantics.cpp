#include "dali/semantics.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "dali/parser.hpp"

namespace dali {

std::string_view to_string(TransformRule r) {
  switch (r) {
    case TransformRule::ordinary:
      return "ordinary";
    case TransformRule::reactive:
      return "reactive-transform";
    case TransformRule::past:
      return "past-transform";
    case TransformRule::action:
      return "action-transform";
    case TransformRule::action_support:
      return "action-support";
    case TransformRule::initial_event:
      return "initial-event";
  }
  return "?";
}

std::string extended_name(const Atom& a) {
  switch (a.marker) {
    case Marker::past:
      return "past_" + a.name;
    case Marker::present:
      return "now_" + a.name;
    case Marker::plain:
      break;
  }
  return a.name;
}

InitialSituation parse_initial_situation(std::string_view csv) {
  InitialSituation init;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string_view item = csv.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    start = comma == std::string_view::npos ? csv.size() + 1 : comma + 1;
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    Atom a = parse_atom(item);
    if (a.marker == Marker::present) throw std::invalid_argument("initial events are plain or past(..), not now(..)");
    init.events.push_back(std::move(a));
  }
  return init;
}

namespace {

void push_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::vector<std::string> rename(const std::vector<Atom>& body) {
  std::vector<std::string> out;
  out.reserve(body.size());
  for (const auto& a : body) out.push_back(extended_name(a));
  return out;
}

}  // namespace

TransformedProgram transform_program(const AgentProgram& p, const InitialSituation& init) {
  TransformedProgram tp;
  tp.agent = p.name;
  auto emit = [&](HornClause c, std::optional<std::size_t> src, TransformRule rule) {
    tp.clauses.push_back(std::move(c));
    tp.provenance.push_back({src, rule});
  };

  auto preconditions = [&](const std::string& action) {
    if (auto idx = p.action_clause(action)) return rename(p.clauses[*idx].body);
    return std::vector<std::string>{};
  };

  // Generated action clauses for one clause of the reactive-transformed program.
  auto add_action_clauses = [&](const HornClause& c, std::size_t src) {
    std::vector<std::string> actions;
    std::vector<std::string> others;
    for (const auto& b : c.body) {
      if (p.is_action(b))
        push_unique(actions, b);
      else
        others.push_back(b);
    }
    if (actions.empty()) return;

    for (const auto& a : actions) {
      std::vector<std::string> cond{c.head};
      for (const auto& d : others) push_unique(cond, d);
      for (const auto& pre : preconditions(a)) push_unique(cond, pre);
      emit({a, std::move(cond)}, src, TransformRule::action);
    }

    if (std::find(others.begin(), others.end(), c.head) != others.end()) return;
    std::vector<std::string> support;
    for (const auto& d : others) push_unique(support, d);
    for (const auto& a : actions)
      for (const auto& pre : preconditions(a)) push_unique(support, pre);
    emit({c.head, std::move(support)}, src, TransformRule::action_support);
  };

  for (std::size_t i = 0; i < p.clauses.size(); ++i) {
    const Clause& c = p.clauses[i];
    switch (c.kind) {
      case ClauseKind::action:
        break;
      case ClauseKind::ordinary: {
        HornClause h{c.head, rename(c.body)};
        emit(h, i, TransformRule::ordinary);
        add_action_clauses(h, i);
        break;
      }
      case ClauseKind::reactive: {
        std::vector<std::string> body{c.head};
        for (auto& b : rename(c.body)) body.push_back(std::move(b));
        HornClause reactive{c.head, body};
        emit(reactive, i, TransformRule::reactive);
        emit({"past_" + c.head, body}, i, TransformRule::past);
        add_action_clauses(reactive, i);
        break;
      }
    }
  }

  for (const Atom& e : init.events) {
    if (!p.is_event(e.name))
      throw std::invalid_argument("initial event '" + to_string(e) + "' is not a declared event of " + p.name);
    if (e.marker == Marker::past) {
      emit({"past_" + e.name, {}}, std::nullopt, TransformRule::initial_event);
    } else if (e.marker == Marker::plain) {
      emit({e.name, {}}, std::nullopt, TransformRule::initial_event);
      emit({"now_" + e.name, {}}, std::nullopt, TransformRule::initial_event);
    } else {
      throw std::invalid_argument("initial events are plain or past(..), not now(..)");
    }
  }
  return tp;
}

namespace {

struct IndexedProgram {
  std::vector<std::string> names;
  std::vector<std::size_t> heads;
  std::vector<std::vector<std::size_t>> bodies;  // deduplicated atom ids
};

IndexedProgram index(const std::vector<HornClause>& clauses) {
  IndexedProgram ip;
  std::unordered_map<std::string, std::size_t> ids;
  auto id = [&](const std::string& s) {
    auto [it, fresh] = ids.emplace(s, ip.names.size());
    if (fresh) ip.names.push_back(s);
    return it->second;
  };
  ip.heads.reserve(clauses.size());
  ip.bodies.reserve(clauses.size());
  for (const auto& c : clauses) {
    ip.heads.push_back(id(c.head));
    std::vector<std::size_t> body;
    for (const auto& b : c.body) body.push_back(id(b));
    std::sort(body.begin(), body.end());
    body.erase(std::unique(body.begin(), body.end()), body.end());
    ip.bodies.push_back(std::move(body));
  }
  return ip;
}

std::vector<char> propagate_serial(const IndexedProgram& ip) {
  const std::size_t n = ip.names.size();
  std::vector<char> in(n, 0);
  std::vector<std::size_t> missing(ip.heads.size());
  std::vector<std::vector<std::size_t>> watchers(n);
  std::vector<std::size_t> queue;

  for (std::size_t c = 0; c < ip.heads.size(); ++c) {
    missing[c] = ip.bodies[c].size();
    for (auto b : ip.bodies[c]) watchers[b].push_back(c);
    if (missing[c] == 0 && !in[ip.heads[c]]) {
      in[ip.heads[c]] = 1;
      queue.push_back(ip.heads[c]);
    }
  }
  while (!queue.empty()) {
    const std::size_t a = queue.back();
    queue.pop_back();
    for (auto c : watchers[a]) {
      if (--missing[c] == 0 && !in[ip.heads[c]]) {
        in[ip.heads[c]] = 1;
        queue.push_back(ip.heads[c]);
      }
    }
  }
  return in;
}

std::vector<char> propagate_parallel(const IndexedProgram& ip) {
  const std::size_t n = ip.names.size();
  const auto m = static_cast<std::ptrdiff_t>(ip.heads.size());
  std::vector<char> in(n, 0);
  std::vector<char> fired(ip.heads.size(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < m; ++c) {
      const auto& body = ip.bodies[static_cast<std::size_t>(c)];
      fired[static_cast<std::size_t>(c)] =
          !in[ip.heads[static_cast<std::size_t>(c)]] &&
          std::all_of(body.begin(), body.end(), [&](std::size_t b) { return in[b] != 0; });
    }
    for (std::size_t c = 0; c < ip.heads.size(); ++c) {
      if (fired[c] && !in[ip.heads[c]]) {
        in[ip.heads[c]] = 1;
        changed = true;
      }
    }
  }
  return in;
}

}  // namespace

HerbrandModel least_model(const std::vector<HornClause>& clauses, Execution exec) {
  const IndexedProgram ip = index(clauses);
  const std::vector<char> in = exec == Execution::serial ? propagate_serial(ip) : propagate_parallel(ip);
  HerbrandModel m;
  for (std::size_t a = 0; a < in.size(); ++a)
    if (in[a]) m.insert(ip.names[a]);
  return m;
}

HerbrandModel least_model(const TransformedProgram& tp, Execution exec) { return least_model(tp.clauses, exec); }

TransformedProgram restrict_by_strategy(const TransformedProgram& tp, const ClauseFilter& keep) {
  TransformedProgram out;
  out.agent = tp.agent;
  for (std::size_t i = 0; i < tp.clauses.size(); ++i) {
    if (keep && !keep(tp.clauses[i], tp.provenance[i])) continue;
    out.clauses.push_back(tp.clauses[i]);
    out.provenance.push_back(tp.provenance[i]);
  }
  return out;
}

HerbrandModel snapshot(const AgentProgram& p, const InitialSituation& init, const ClauseFilter& keep,
                       Execution exec) {
  return least_model(restrict_by_strategy(transform_program(p, init), keep), exec);
}

std::string print_transformed(const TransformedProgram& tp) {
  std::ostringstream os;
  os << "agent " << tp.agent << ".\n";
  for (std::size_t i = 0; i < tp.clauses.size(); ++i) {
    const auto& c = tp.clauses[i];
    std::string line = c.head;
    for (std::size_t j = 0; j < c.body.size(); ++j) line += (j ? ", " : " :- ") + c.body[j];
    line += ".";
    os << line;
    if (line.size() < 40) os << std::string(40 - line.size(), ' ');
    os << "  % " << to_string(tp.provenance[i].rule);
    if (tp.provenance[i].source) os << " (clause " << *tp.provenance[i].source + 1 << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace dali
