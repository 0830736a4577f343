#include "dali/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_set>

namespace dali::oracle {

HerbrandModel naive_fixpoint(const std::vector<HornClause>& clauses) {
  HerbrandModel current;
  for (;;) {
    HerbrandModel next;
    for (const auto& c : clauses) {
      bool holds = true;
      for (const auto& b : c.body)
        if (!current.contains(b)) holds = false;
      if (holds) next.insert(c.head);
    }
    if (next == current) return current;
    current = next;
  }
}

namespace {

enum Kind { prove = 0, now = 1, past = 2, root = 3, close = 4 };

struct Item {
  std::string name;
  Kind kind = prove;
  std::vector<std::string> path;  // atoms already being proved above this one
  std::vector<int> scopes;        // open nested subproofs this item belongs to
  int nest = -1;                  // for `close`: the subproof it ends
};

struct Choice {
  std::vector<Item> goal;
  std::size_t pos = 0;
  std::vector<std::size_t> untried;
};

struct Comp {
  std::vector<Item> goal;
  std::vector<Choice> stack;
  std::string attempt_of;
  int next_nest = 0;
};

struct State {
  std::vector<Comp> comps;
  std::set<std::string> ev, iv, pv;
  std::multiset<std::string> performed;
  int epoch = 0;
  std::map<std::string, int> attempted_at;
};

void put(std::string& k, const std::string& s) {
  k += s;
  k += '\x1f';
}

void put(std::string& k, const Item& it) {
  put(k, it.name);
  k += char('0' + it.kind);
  for (const auto& p : it.path) put(k, p);
  k += '|';
  for (int s : it.scopes) put(k, std::to_string(s));
  k += '|';
  put(k, std::to_string(it.nest));
}

std::string key(const State& s) {
  std::string k;
  for (const auto& c : s.comps) {
    k += "C";
    put(k, c.attempt_of);
    put(k, std::to_string(c.next_nest));
    for (const auto& it : c.goal) put(k, it);
    for (const auto& ch : c.stack) {
      k += "S";
      put(k, std::to_string(ch.pos));
      for (const auto& it : ch.goal) put(k, it);
      for (auto u : ch.untried) put(k, std::to_string(u));
    }
  }
  k += "E";
  for (const auto& e : s.ev) put(k, e);
  k += "I";
  for (const auto& e : s.iv) put(k, e);
  k += "P";
  for (const auto& e : s.pv) put(k, e);
  k += "A";
  for (const auto& e : s.performed) put(k, e);
  k += "T" + std::to_string(s.epoch);
  for (const auto& [a, e] : s.attempted_at) put(k, a + "=" + std::to_string(e));
  return k;
}

class Explorer {
 public:
  Explorer(const AgentProgram& p, Bounds b) : p_(p), bounds_(b) {}

  ReachabilityResult explore(State init) {
    ReachabilityResult res;
    std::deque<State> frontier;
    std::unordered_set<std::string> seen;
    seen.insert(key(init));
    frontier.push_back(std::move(init));
    while (!frontier.empty()) {
      if (res.explored >= bounds_.max_states) {
        res.truncated = true;
        break;
      }
      State s = std::move(frontier.front());
      frontier.pop_front();
      ++res.explored;
      std::vector<State> next = successors(s);
      if (next.empty()) {
        std::vector<std::string> perf(s.performed.begin(), s.performed.end());
        res.outcomes.insert({perf, s.pv});
      }
      for (auto& n : next)
        if (seen.insert(key(n)).second) frontier.push_back(std::move(n));
    }
    return res;
  }

 private:
  std::vector<std::size_t> defining(const std::string& name) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p_.clauses.size(); ++i)
      if (p_.clauses[i].head == name && p_.clauses[i].kind != ClauseKind::reactive) out.push_back(i);
    return out;
  }

  bool has_clause(const std::string& name, ClauseKind kind) const {
    for (const auto& c : p_.clauses)
      if (c.head == name && c.kind == kind) return true;
    return false;
  }

  std::size_t reactive(const std::string& name) const {
    for (std::size_t i = 0; i < p_.clauses.size(); ++i)
      if (p_.clauses[i].head == name && p_.clauses[i].kind == ClauseKind::reactive) return i;
    return p_.clauses.size();
  }

  // Replaces goal[pos] by the body of clause `k`.
  void expand(Comp& c, std::size_t pos, std::size_t k) const {
    const Item it = c.goal[pos];
    const Clause& cl = p_.clauses[k];
    std::vector<std::string> path = it.path;
    path.push_back(it.name);
    std::sort(path.begin(), path.end());
    path.erase(std::unique(path.begin(), path.end()), path.end());

    const bool nested = cl.kind == ClauseKind::action || (it.kind == prove && p_.is_internal(it.name));
    std::vector<int> scopes = it.scopes;
    int id = -1;
    if (nested) {
      id = c.next_nest++;
      scopes.push_back(id);
    }
    std::vector<Item> repl;
    for (const auto& b : cl.body) {
      Kind kind = b.marker == Marker::present ? now : b.marker == Marker::past ? past : prove;
      repl.push_back({b.name, kind, path, scopes, -1});
    }
    if (nested) repl.push_back({it.name, close, it.path, it.scopes, id});
    c.goal.erase(c.goal.begin() + static_cast<std::ptrdiff_t>(pos));
    c.goal.insert(c.goal.begin() + static_cast<std::ptrdiff_t>(pos), repl.begin(), repl.end());
  }

  // Component `ci` is finished (empty) or failed: drop it.
  static void drop(State& s, std::size_t ci) { s.comps.erase(s.comps.begin() + static_cast<std::ptrdiff_t>(ci)); }

  static void tidy(State& s, std::size_t ci) {
    if (s.comps[ci].goal.empty()) drop(s, ci);
  }

  void fail(const State& s, std::size_t ci, std::vector<State>& out) const {
    const Comp& c = s.comps[ci];
    if (c.stack.empty()) {
      State n = s;
      drop(n, ci);
      out.push_back(std::move(n));
      return;
    }
    const Choice& top = c.stack.back();
    for (std::size_t k : top.untried) {
      State n = s;
      Comp& nc = n.comps[ci];
      Choice ch = nc.stack.back();
      nc.stack.pop_back();
      nc.goal = ch.goal;
      std::vector<std::size_t> rest;
      for (auto u : ch.untried)
        if (u != k) rest.push_back(u);
      if (!rest.empty()) nc.stack.push_back({ch.goal, ch.pos, rest});
      expand(nc, ch.pos, k);
      tidy(n, ci);
      out.push_back(std::move(n));
    }
  }

  std::vector<State> successors(const State& s) const {
    std::vector<State> out;

    for (std::size_t ci = 0; ci < s.comps.size(); ++ci) {
      const Comp& c = s.comps[ci];
      for (std::size_t j = 0; j < c.goal.size(); ++j) {
        const Item& it = c.goal[j];
        switch (it.kind) {
          case close: {
            bool open = false;
            for (std::size_t o = 0; o < c.goal.size(); ++o)
              if (o != j && std::find(c.goal[o].scopes.begin(), c.goal[o].scopes.end(), it.nest) != c.goal[o].scopes.end())
                open = true;
            if (open) break;
            State n = s;
            if (p_.is_action(it.name)) n.performed.insert(it.name);
            if (p_.is_internal(it.name)) n.iv.insert(it.name);
            n.comps[ci].goal.erase(n.comps[ci].goal.begin() + static_cast<std::ptrdiff_t>(j));
            tidy(n, ci);
            out.push_back(std::move(n));
            break;
          }
          case now:
          case past: {
            const bool holds = it.kind == now ? s.ev.contains(it.name) : s.pv.contains(it.name);
            if (!holds) {
              fail(s, ci, out);
              break;
            }
            State n = s;
            n.comps[ci].goal.erase(n.comps[ci].goal.begin() + static_cast<std::ptrdiff_t>(j));
            tidy(n, ci);
            out.push_back(std::move(n));
            break;
          }
          case root: {
            State n = s;
            expand(n.comps[ci], j, reactive(it.name));
            tidy(n, ci);
            out.push_back(std::move(n));
            break;
          }
          case prove: {
            if (p_.is_action(it.name) && !has_clause(it.name, ClauseKind::action)) {
              State n = s;
              n.performed.insert(it.name);
              if (p_.is_internal(it.name)) n.iv.insert(it.name);
              n.comps[ci].goal.erase(n.comps[ci].goal.begin() + static_cast<std::ptrdiff_t>(j));
              tidy(n, ci);
              out.push_back(std::move(n));
              break;
            }
            std::vector<std::size_t> cls = defining(it.name);
            if (std::find(it.path.begin(), it.path.end(), it.name) != it.path.end() || cls.empty()) {
              fail(s, ci, out);
              break;
            }
            for (std::size_t k : cls) {
              State n = s;
              Comp& nc = n.comps[ci];
              std::vector<std::size_t> rest;
              for (auto u : cls)
                if (u != k) rest.push_back(u);
              if (!rest.empty()) nc.stack.push_back({nc.goal, j, rest});
              expand(nc, j, k);
              tidy(n, ci);
              out.push_back(std::move(n));
            }
            break;
          }
        }
      }
    }

    auto react = [&](const std::string& e, bool external) {
      State n = s;
      (external ? n.ev : n.iv).erase(e);
      n.pv.insert(e);
      if (external) ++n.epoch;
      if (reactive(e) < p_.clauses.size()) {
        Comp c;
        c.goal.push_back({e, root, {}, {}, -1});
        n.comps.push_back(std::move(c));
      }
      out.push_back(std::move(n));
    };
    for (const auto& e : s.ev) react(e, true);
    for (const auto& e : s.iv) react(e, false);

    for (const auto& a : p_.internals) {
      if (p_.is_action(a) || s.iv.contains(a)) continue;
      bool live = false;
      for (const auto& c : s.comps)
        if (c.attempt_of == a) live = true;
      if (live) continue;
      if (auto it = s.attempted_at.find(a); it != s.attempted_at.end() && it->second == s.epoch) continue;
      State n = s;
      n.attempted_at[a] = s.epoch;
      Comp c;
      c.attempt_of = a;
      c.goal.push_back({a, prove, {}, {}, -1});
      n.comps.push_back(std::move(c));
      out.push_back(std::move(n));
    }
    return out;
  }

  const AgentProgram& p_;
  Bounds bounds_;
};

}  // namespace

ReachabilityResult exhaustive_interleavings(const AgentProgram& p, const std::vector<std::string>& inbox,
                                            const std::optional<Atom>& query, Bounds bounds) {
  State init;
  for (const auto& e : inbox) {
    if (init.ev.insert(e).second) ++init.epoch;
  }
  if (query) {
    Comp c;
    Kind kind = query->marker == Marker::present ? now : query->marker == Marker::past ? past : prove;
    c.goal.push_back({query->name, kind, {}, {}, -1});
    init.comps.push_back(std::move(c));
  }
  return Explorer(p, bounds).explore(std::move(init));
}

AgentProgram random_pure_program(std::mt19937_64& rng, std::size_t max_atoms, std::size_t max_clauses) {
  AgentProgram p;
  p.name = "Random";
  const std::size_t atoms = std::uniform_int_distribution<std::size_t>(1, max_atoms)(rng);
  const std::size_t clauses = std::uniform_int_distribution<std::size_t>(0, max_clauses)(rng);
  std::uniform_int_distribution<std::size_t> pick(0, atoms - 1);
  std::uniform_int_distribution<int> body_len(0, 3);
  for (std::size_t i = 0; i < clauses; ++i) {
    Clause c;
    c.head = "a" + std::to_string(pick(rng));
    const int len = body_len(rng);
    for (int k = 0; k < len; ++k) c.body.emplace_back("a" + std::to_string(pick(rng)));
    p.clauses.push_back(std::move(c));
  }
  return p;
}

AgentProgram random_agent_program(std::mt19937_64& rng) {
  AgentProgram p;
  p.name = "Agent" + std::to_string(rng() % 100);
  auto coin = [&](int percent) { return static_cast<int>(rng() % 100) < percent; };
  auto pick = [&](const std::vector<std::string>& v) { return v[rng() % v.size()]; };

  std::vector<std::string> plain;
  const std::size_t n_plain = 1 + rng() % 4;
  for (std::size_t i = 0; i < n_plain; ++i) plain.push_back("p" + std::to_string(i));
  const std::size_t n_ext = rng() % 3, n_int = rng() % 3, n_act = rng() % 3;
  for (std::size_t i = 0; i < n_ext; ++i) p.externals.insert("e" + std::to_string(i));
  for (std::size_t i = 0; i < n_int; ++i) p.internals.insert("i" + std::to_string(i));
  for (std::size_t i = 0; i < n_act; ++i) p.actions.insert("act" + std::to_string(i));
  if (n_act > 0 && n_int > 0 && coin(30)) p.internals.insert("act0");

  auto body_atom = [&]() -> Atom {
    const int r = static_cast<int>(rng() % 10);
    if (r < 2 && !p.externals.empty()) return Atom::now(pick(p.externals.items()));
    if (r < 4 && (!p.externals.empty() || !p.internals.empty())) {
      std::vector<std::string> ev = p.externals.items();
      for (const auto& i : p.internals) ev.push_back(i);
      return Atom::past(pick(ev));
    }
    if (r < 6 && !p.actions.empty()) return Atom(pick(p.actions.items()));
    if (r < 7 && !p.internals.empty()) return Atom(pick(p.internals.items()));
    return Atom(pick(plain));
  };
  auto body = [&](std::size_t min) {
    std::vector<Atom> b;
    const std::size_t len = min + rng() % 3;
    for (std::size_t k = 0; k < len; ++k) b.push_back(body_atom());
    return b;
  };

  for (const auto& e : p.externals)
    if (coin(80)) p.clauses.push_back({e, body(1), ClauseKind::reactive});
  for (const auto& i : p.internals) {
    if (!p.is_action(i) && coin(70)) p.clauses.push_back({i, body(0), ClauseKind::ordinary});
    if (coin(70)) p.clauses.push_back({i, body(1), ClauseKind::reactive});
  }
  for (const auto& a : p.actions)
    if (coin(50)) p.clauses.push_back({a, body(1), ClauseKind::action});
  const std::size_t n_rules = rng() % 6;
  for (std::size_t i = 0; i < n_rules; ++i) p.clauses.push_back({pick(plain), body(0), ClauseKind::ordinary});
  std::shuffle(p.clauses.begin(), p.clauses.end(), rng);
  return p;
}

std::vector<HornClause> horn_clauses(const AgentProgram& p) {
  std::vector<HornClause> out;
  for (const auto& c : p.clauses) {
    HornClause h{c.head, {}};
    for (const auto& b : c.body) h.body.push_back(extended_name(b));
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace dali::oracle
