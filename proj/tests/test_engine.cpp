#include <doctest.h>

#include <random>

#include "dali/engine.hpp"
#include "dali/oracle.hpp"
#include "dali/parser.hpp"
#include "helpers.hpp"

using namespace dali;

namespace {

GoalState goal_of(std::initializer_list<Atom> atoms) {
  ComponentGoal c;
  for (const auto& a : atoms) c.atoms.push_back({a, GoalAtom::Kind::prove, {}, std::nullopt});
  return {c};
}

std::vector<Atom> atoms_of(const ComponentGoal& c) {
  std::vector<Atom> out;
  for (const auto& g : c.atoms) out.push_back(g.atom);
  return out;
}

std::size_t count_case(const std::vector<StepRecord>& t, Case k, const std::string& selected) {
  std::size_t n = 0;
  for (const auto& r : t) n += r.kase == k && r.selected == selected;
  return n;
}

}  // namespace

TEST_CASE("sld step replaces the selected atom by the clause body") {
  const auto p = test::load("danger.dali");
  auto g = goal_of({Atom("ask_for_help")});
  const auto idx = p.defining_clauses("ask_for_help");
  REQUIRE(sld_step(p, g, 0, 0, idx[0]));
  CHECK(atoms_of(g[0]) == std::vector<Atom>{Atom("call_police")});
  CHECK(g[0].atoms[0].ancestors == std::vector<std::string>{"ask_for_help"});
}

TEST_CASE("sld step on a fact empties the component") {
  const auto p = parse_agent_file("agent A. p.");
  auto g = goal_of({Atom("p")});
  REQUIRE(sld_step(p, g, 0, 0, 0));
  CHECK(g[0].atoms.empty());
}

TEST_CASE("ancestor loop check fails p :- p") {
  const auto p = parse_agent_file("agent A. p :- p.");
  auto g = goal_of({Atom("p")});
  REQUIRE(sld_step(p, g, 0, 0, 0));
  CHECK_FALSE(sld_step(p, g, 0, 0, 0));
  const auto r = run(p, Atom("p"), {});
  CHECK(r.query_succeeded == false);
}

TEST_CASE("sld step refuses a clause that does not define the atom") {
  const auto p = parse_agent_file("agent A. p. q.");
  auto g = goal_of({Atom("p")});
  CHECK_FALSE(sld_step(p, g, 0, 0, 1));
}

TEST_CASE("preconditionless action") {
  const auto p = test::load("danger.dali");
  auto g = goal_of({Atom("scream")});
  AgentState s;
  action_step(p, g, s, 0, 0, 4);
  CHECK(g[0].atoms.empty());
  CHECK(test::performed(s) == std::vector<std::string>{"scream"});
  CHECK(s.performed[0].step == 4);

  const auto q = parse_agent_file("agent A. @action a. b.");
  auto h = goal_of({Atom("a"), Atom("b")});
  AgentState t;
  action_step(q, h, t, 0, 0, 0);
  CHECK(atoms_of(h[0]) == std::vector<Atom>{Atom("b")});
  CHECK(test::performed(t) == std::vector<std::string>{"a"});
}

TEST_CASE("an action with an action rule goes through resolution and nest completion") {
  const auto p = test::load("anne.dali");
  auto g = goal_of({Atom("go_by_car")});
  AgentState s;
  REQUIRE(sld_step(p, g, 0, 0, *p.action_clause("go_by_car")));
  REQUIRE(g[0].atoms.size() == 2);
  CHECK(g[0].atoms[0].atom == Atom("car_available"));
  CHECK(g[0].atoms[1].kind == GoalAtom::Kind::nest_end);
  REQUIRE(sld_step(p, g, 0, 0, p.defining_clauses("car_available")[0]));
  const auto done = nest_completion_step(p, g, s, 0, 0, 2);
  CHECK(done == std::optional<std::string>("go_by_car"));
  CHECK(g[0].atoms.empty());
  CHECK(test::performed(s) == std::vector<std::string>{"go_by_car"});
  CHECK(s.iv == std::vector<std::string>{"go_by_car"});
}

TEST_CASE("present event test") {
  AgentState s;
  auto g = goal_of({Atom::now("alarm_clock_rings")});
  CHECK_FALSE(present_event_step(g, 0, 0, s));
  s.ev = {"alarm_clock_rings"};
  REQUIRE(present_event_step(g, 0, 0, s));
  CHECK(g[0].atoms.empty());
  CHECK(s.ev == std::vector<std::string>{"alarm_clock_rings"});
}

TEST_CASE("past event test") {
  AgentState s;
  auto g = goal_of({Atom::past("girlfriend_call")});
  CHECK_FALSE(past_event_step(g, 0, 0, s));
  s.pv = {"girlfriend_call"};
  CHECK(past_event_step(g, 0, 0, s));
}

TEST_CASE("external reaction consumes the oldest event") {
  const auto p = parse_agent_file("agent A. @external a. @external b. a :> x. b :> y. x. y.");
  GoalState g;
  AgentState s;
  s.ev = {"a", "b"};
  const auto c = external_reaction_step(p, g, s);
  CHECK(c == 0);
  CHECK(s.ev == std::vector<std::string>{"b"});
  CHECK(s.pv == std::set<std::string>{"a"});
  CHECK(g[0].origin == Origin::external_reaction);
  CHECK(g[0].trigger == "a");

  const auto danger = test::load("danger.dali");
  GoalState h = goal_of({Atom("have_a_phone")});
  AgentState t;
  t.ev = {"danger"};
  external_reaction_step(danger, h, t);
  CHECK(h.size() == 2);
  CHECK(atoms_of(h[0]) == std::vector<Atom>{Atom("have_a_phone")});
  CHECK(t.ev.empty());
  CHECK(t.pv == std::set<std::string>{"danger"});
}

TEST_CASE("reaction steps are not applicable on empty sets") {
  Engine e(parse_agent_file("agent A. @external x. x :> y. y."));
  CHECK_FALSE(e.step().has_value());
}

TEST_CASE("internal reaction performs the reactive body") {
  const auto p = test::load("henry.dali");
  GoalState g;
  AgentState s;
  s.iv = {"happy"};
  internal_reaction_step(p, g, s);
  CHECK(s.iv.empty());
  CHECK(s.pv == std::set<std::string>{"happy"});
  REQUIRE(g.size() == 1);
  CHECK(g[0].origin == Origin::internal_reaction);
  // root is resolved only by the reactive rule, then the action runs
  REQUIRE(sld_step(p, g, 0, 0, *p.reactive_clause("happy")));
  CHECK(atoms_of(g[0]) == std::vector<Atom>{Atom("sing_a_song")});
  action_step(p, g, s, 0, 0, 0);
  CHECK(test::performed(s) == std::vector<std::string>{"sing_a_song"});
}

TEST_CASE("internal attempt") {
  const auto henry = test::load("henry.dali");
  GoalState g;
  CHECK(internal_attempt_step(henry, g, "happy") == 0);
  CHECK(g[0].origin == Origin::internal_attempt);
  CHECK(g[0].nesting == std::optional<std::string>("happy"));

  Engine e(henry);
  std::vector<StepRecord> t;
  while (auto r = e.step()) t.push_back(*r);
  CHECK(test::performed(e.state()) == std::vector<std::string>{"sing_a_song"});
  CHECK(e.state().pv == std::set<std::string>{"happy"});

  Engine f(parse_agent_file("agent Henry. @internal happy. @action sing_a_song. happy :- sunny_day. "
                            "happy :> sing_a_song."));
  while (f.step()) {
  }
  CHECK(f.state().iv.empty());
  CHECK(f.state().performed.empty());
  CHECK(f.attempts("happy") == 1);
}

TEST_CASE("attempts are bounded by the internal check period") {
  // A failing attempt is retried after each arrival; arrivals come every tick.
  const auto p = parse_agent_file("agent A. @external e. @internal i. i :- q. i :> z. e :> w. w. z.");
  for (std::size_t m : {1u, 2u, 3u, 5u}) {
    Strategy s;
    s.internal_check_period = m;
    s.event_check_period = 1;
    s.max_steps = 60;
    EventScript inbox;
    for (std::size_t t = 0; t < 60; ++t) inbox.push_back({t, "A", "e"});
    const auto r = run(p, std::nullopt, inbox, s, {1});
    const std::size_t attempts = count_case(r.trace, Case::vi, "i");
    CAPTURE(m);
    CHECK(attempts > 0);
    CHECK(attempts <= (s.max_steps + m - 1) / m);
  }
}

TEST_CASE("scenario outcomes under the default strategy") {
  SUBCASE("danger") {
    const auto r = run(test::load("danger.dali"), std::nullopt, test::at_start("Ag", {"danger"}));
    CHECK(test::performed(r.state) == std::vector<std::string>{"call_police"});
    CHECK(r.state.pv == std::set<std::string>{"danger"});
  }
  SUBCASE("henry") {
    const auto r = run(test::load("henry.dali"), std::nullopt, {});
    CHECK(test::performed(r.state) == std::vector<std::string>{"sing_a_song"});
    CHECK(r.state.pv == std::set<std::string>{"happy"});
  }
  SUBCASE("anne") {
    const auto r = run(test::load("anne.dali"), std::nullopt, test::at_start("Anne", {"invitation"}));
    CHECK(test::performed(r.state) == std::vector<std::string>{"go_by_car", "ask_susan_to_join"});
    CHECK(r.state.pv == std::set<std::string>{"go_by_car", "invitation"});
  }
  SUBCASE("anne without a car takes the bus") {
    auto p = test::load("anne.dali");
    std::erase_if(p.clauses, [](const Clause& c) { return c.head == "car_available"; });
    const auto r = run(p, std::nullopt, test::at_start("Anne", {"invitation"}));
    CHECK(test::performed(r.state) == std::vector<std::string>{"take_the_bus"});
  }
  SUBCASE("mary") {
    const auto r = run(test::load("mary.dali"), std::nullopt, test::at_start("Mary", {"alarm_clock_rings"}));
    CHECK(test::sorted(test::performed(r.state)) == std::vector<std::string>{"stand_up", "switch_it_off"});
    CHECK(r.state.pv == std::set<std::string>{"alarm_clock_rings", "my_god_its_late"});
    CHECK(count_case(r.trace, Case::iii, "now(alarm_clock_rings)") == 1);
  }
  SUBCASE("george") {
    const auto p = test::load("george.dali");
    CHECK(run(p, Atom("happy"), {}).query_succeeded == false);
    EventScript inbox{{0, "George", "girlfriend_call"}};
    Engine e(p);
    e.inject("girlfriend_call");
    while (e.step()) {
    }
    const auto idx = e.add_query(Atom("happy"));
    while (e.step()) {
    }
    CHECK(e.goal()[idx].status == Status::succeeded);
  }
}

TEST_CASE("query success and failure") {
  CHECK(run(parse_agent_file("agent A."), Atom("p"), {}).query_succeeded == false);
  CHECK(run(parse_agent_file("agent A. p."), Atom("p"), {}).query_succeeded == true);
  CHECK(run(parse_agent_file("agent A. p :- q. p :- r. r."), Atom("p"), {}).query_succeeded == true);
}

TEST_CASE("injection") {
  Engine e(test::load("mary.dali"));
  e.inject("alarm_clock_rings");
  e.inject("alarm_clock_rings");
  CHECK(e.state().ev.size() == 1);
  CHECK(e.state().arrivals == 1);
  CHECK(e.state().coalesced == 1);
  CHECK_THROWS_AS(e.inject("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(Engine(parse_agent_file("agent A. @external e. e :> x. e :> y.")), ProgramError);
}

TEST_CASE("trace lines have a fixed field order") {
  StepRecord r;
  r.step = 3;
  r.kase = Case::iv;
  r.agent = "Mary";
  r.selected = "alarm_clock_rings";
  r.component = 2;
  r.after.pv = {"alarm_clock_rings"};
  r.performed = "switch_it_off";
  CHECK(trace_line(r) ==
        R"({"step":3,"case":"iv","agent":"Mary","selected":"alarm_clock_rings","component":2,"ev":[],"iv":[],)"
        R"("pv":["alarm_clock_rings"],"performed":"switch_it_off"})");
}

TEST_CASE("contract checker flags bad deltas") {
  StepRecord r;
  r.kase = Case::iv;
  r.before.ev = {"a"};
  r.after.ev = {"a"};
  CHECK_FALSE(contract_violations(r).empty());
  r.after.ev = {};
  r.after.pv = {"a"};
  CHECK(contract_violations(r).empty());
  r.kase = Case::i;
  CHECK_FALSE(contract_violations(r).empty());
}

namespace {

struct Scenario {
  AgentProgram program;
  EventScript inbox;
};

Scenario random_scenario(std::mt19937_64& rng) {
  Scenario s{oracle::random_agent_program(rng), {}};
  const auto& ext = s.program.externals.items();
  if (!ext.empty()) {
    const std::size_t n = rng() % 6;
    std::size_t tick = 0;
    for (std::size_t i = 0; i < n; ++i) {
      tick += rng() % 3;
      s.inbox.push_back({tick, s.program.name, ext[rng() % ext.size()]});
    }
  }
  return s;
}

}  // namespace

TEST_CASE("invariants over random agents") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const Scenario sc = random_scenario(rng);
    CAPTURE(print_program(sc.program));
    Strategy st;
    st.max_steps = 400;
    const auto r = run(sc.program, std::nullopt, sc.inbox, st, {5});

    // past events only grow and every record keeps its case contract
    std::size_t pv = 0;
    for (const auto& rec : r.trace) {
      CHECK(contract_violations(rec).empty());
      CHECK(rec.after.pv.size() >= pv);
      pv = rec.after.pv.size();
    }
    // every arrival is pending, consumed or coalesced
    CHECK(r.state.arrivals + r.state.coalesced == sc.inbox.size());
    CHECK(r.state.arrivals == r.state.ev.size() + r.state.consumed);
    // each consumption is exactly one case (iv) record
    std::size_t reactions = 0;
    for (const auto& rec : r.trace) reactions += rec.kase == Case::iv;
    CHECK(reactions == r.state.consumed);
    // replay is exact
    const auto again = run(sc.program, std::nullopt, sc.inbox, st, {5});
    CHECK(again.trace == r.trace);
    CHECK(again.state == r.state);
  }
}

TEST_CASE("default outcome is reachable per the oracle on small agents") {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const Scenario sc = random_scenario(rng);
    std::vector<std::string> events;
    for (const auto& e : sc.inbox)
      if (std::find(events.begin(), events.end(), e.event) == events.end()) events.push_back(e.event);
    EventScript inbox;
    for (const auto& e : events) inbox.push_back({0, sc.program.name, e});

    const auto reach = oracle::exhaustive_interleavings(sc.program, events, std::nullopt, {4000});
    if (reach.truncated) continue;
    const auto r = run(sc.program, std::nullopt, inbox);
    if (r.truncated) continue;
    CAPTURE(print_program(sc.program));
    CHECK(reach.reachable({test::sorted(test::performed(r.state)), r.state.pv}));
    ++checked;
  }
  MESSAGE("oracle-checked agents: " << checked);
  CHECK(checked > 100);
}
