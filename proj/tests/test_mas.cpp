#include <doctest.h>

#include "dali/mas.hpp"
#include "dali/parser.hpp"
#include "helpers.hpp"

using namespace dali;

namespace {

SystemConfig config_of(std::vector<std::string> sources, EventScript script = {}) {
  SystemConfig c;
  for (const auto& s : sources) c.agents.push_back(parse_agent_file(s));
  c.script = std::move(script);
  return c;
}

const char* kRinger = "agent A. @internal go. @action ring. go. go :> ring.";
const char* kListener = "agent B. @external ring. @action answer. ring :> answer.";

}  // namespace

TEST_CASE("actions reach the other agents on the next tick") {
  const auto c = config_of({kRinger, kListener});
  REQUIRE(validate_config(c).empty());
  auto s = make_system_state(c);
  system_tick(s, c);
  CHECK(test::performed(s.engines[0].state()) == std::vector<std::string>{"ring"});
  CHECK(s.engines[1].state().ev.empty());
  REQUIRE(s.inbox[1].size() == 1);
  CHECK(s.inbox[1][0] == Delivery{1, "ring", "A"});
  system_tick(s, c);
  CHECK(s.engines[1].state().pv == std::set<std::string>{"ring"});
  CHECK(s.inbox_history[0].empty());
}

TEST_CASE("script entries are injected at their tick") {
  auto c = config_of({read_file(test::agent_path("mary.dali"))}, {{0, "Mary", "alarm_clock_rings"}});
  c.step_budget = 1;
  auto s = make_system_state(c);
  system_tick(s, c);
  CHECK(s.inbox_history[0] == std::vector<Delivery>{{0, "alarm_clock_rings", "script"}});
  CHECK(s.engines[0].state().arrivals == 1);
}

TEST_CASE("idle systems are quiescent after one tick") {
  const auto c = config_of({"agent A. p.", "agent B. q."});
  const auto r = run_system(c);
  CHECK_FALSE(r.truncated);
  CHECK(r.state.tick == 1);
  CHECK(r.state.trace.empty());
}

TEST_CASE("explicit mapping overrides identity") {
  auto c = config_of({kRinger, "agent B. @external phone_rings. phone_rings :> pick_up. pick_up."});
  CHECK(c.mapping.route(c.agents[0], "ring", c.agents[1]) == std::nullopt);
  c.mapping.add("A", "ring", "B", "phone_rings");
  CHECK(c.mapping.route(c.agents[0], "ring", c.agents[1]) == std::optional<std::string>("phone_rings"));
  CHECK(c.mapping.route(c.agents[0], "ring", c.agents[0]) == std::nullopt);
  const auto r = run_system(c);
  CHECK(r.state.engines[1].state().pv == std::set<std::string>{"phone_rings"});
}

TEST_CASE("config validation") {
  auto c = config_of({kRinger, kListener}, {{0, "C", "x"}, {0, "B", "nope"}});
  c.mapping.add("A", "nope", "B", "ring");
  c.mapping.add("A", "ring", "A", "ring");
  CHECK(validate_config(c).size() == 5);
  CHECK_FALSE(validate_config(config_of({kRinger, kRinger})).empty());
}

TEST_CASE("system file parsing") {
  std::map<std::string, std::string> files{
      {"d/a.dali", kRinger}, {"d/b.dali", kListener}, {"d/s.txt", "2 B ring\n"}};
  auto loader = [&](const std::string& p) { return files.at(p); };
  const auto c =
      parse_system_config("# demo\nagent a.dali\nagent b.dali\nscript s.txt\nmax_ticks 7\nmap A.ring -> B.ring\n",
                          "d", loader);
  CHECK(c.agents.size() == 2);
  CHECK(c.script == EventScript{{2, "B", "ring"}});
  CHECK(c.max_ticks == 7);
  CHECK(c.mapping.entries().size() == 1);
  CHECK_THROWS_AS(parse_system_config("agents a.dali", "d", loader), ParseError);
  CHECK_THROWS_AS(parse_system_config("map A.ring B.ring", "d", loader), ParseError);
  CHECK_THROWS_AS(parse_system_config("max_ticks many", "d", loader), ParseError);
  const auto ping = load_system_config(test::agent_path("ping.sys"));
  CHECK(ping.agents.size() == 2);
}

TEST_CASE("ping system: delivery, no self-delivery, completeness") {
  const auto c = load_system_config(test::agent_path("ping.sys"));
  const auto r = run_system(c);
  CHECK_FALSE(r.truncated);
  const auto& s = r.state;
  REQUIRE(s.broadcasts.size() == 2);
  const auto ping = s.broadcasts[0];
  CHECK(ping == BroadcastRecord{"Producer", "ping", 0});
  CHECK(s.inbox_history[1] == std::vector<Delivery>{{1, "ping", "Producer"}});

  for (const auto& b : s.broadcasts) {
    const auto producer = *c.find(b.producer);
    for (const auto& d : s.inbox_history[producer]) CHECK(d.source != b.producer);
    for (std::size_t j = 0; j < c.agents.size(); ++j) {
      if (j == producer) continue;
      const auto ev = c.mapping.route(c.agents[producer], b.action, c.agents[j]);
      const auto n = std::count(s.inbox_history[j].begin(), s.inbox_history[j].end(),
                                Delivery{b.tick + 1, ev.value_or(""), b.producer});
      CHECK(n == (ev ? 1 : 0));
    }
  }
  CHECK(test::performed(s.engines[1].state()) == std::vector<std::string>{"log_it"});
  CHECK(s.warnings.size() == 1);
}

TEST_CASE("parallel ticks match serial ticks") {
  for (const char* sys : {"ping.sys", "mary.sys", "anne.sys", "danger.sys", "henry.sys"}) {
    const auto c = load_system_config(test::agent_path(sys));
    const auto a = run_system(c, Execution::serial);
    const auto b = run_system(c, Execution::parallel);
    CAPTURE(sys);
    CHECK(a.state.trace == b.state.trace);
    CHECK(a.state.broadcasts == b.state.broadcasts);
    CHECK(a.state.inbox_history == b.state.inbox_history);
  }
  // a wider system: many listeners
  auto c = config_of({kRinger});
  for (int i = 0; i < 12; ++i)
    c.agents.push_back(parse_agent_file("agent L" + std::to_string(i) + ". @external ring. @action answer. "
                                        "ring :> answer."));
  const auto a = run_system(c, Execution::serial);
  const auto b = run_system(c, Execution::parallel);
  CHECK(a.state.trace == b.state.trace);
  CHECK(a.state.tick == b.state.tick);
}

TEST_CASE("runs stop at max_ticks") {
  // two agents that keep answering each other
  auto c = config_of({"agent A. @external pong. @internal go. @action ping. go. go :> ping. pong :> ping.",
                      "agent B. @external ping. @action pong. ping :> pong."});
  c.max_ticks = 9;
  const auto r = run_system(c);
  CHECK(r.truncated);
  CHECK(r.state.tick == 9);
}

TEST_CASE("evolution on a single agent without events") {
  const auto c = config_of({"agent A. p. q :- p."});
  const auto t = evolve_system(c);
  CHECK(t.fixpoint);
  CHECK(t.rounds.size() == 1);
}

TEST_CASE("evolution on the ping system") {
  const auto c = load_system_config(test::agent_path("ping.sys"));
  const auto t = evolve_system(c);
  REQUIRE(t.rounds.size() >= 2);
  CHECK(t.fixpoint);
  const auto& consumer = t.rounds[1].models[1];
  CHECK(consumer.contains("log_it"));
  CHECK(consumer.contains("past_ping"));
  CHECK_FALSE(t.rounds[0].models[1].contains("log_it"));
  std::size_t alphabet = 0;
  for (const auto& a : c.agents) alphabet += a.externals.size() + a.internals.size();
  CHECK(t.rounds.size() <= alphabet + 1);
  CHECK(evolve_system(c, {}, {}, Execution::parallel).rounds.size() == t.rounds.size());
}

TEST_CASE("evolution on Henry") {
  SystemConfig c;
  c.agents.push_back(test::load("henry.dali"));
  const auto t = evolve_system(c);
  REQUIRE(t.rounds.size() >= 2);
  CHECK(t.rounds[0].models[0].contains("sing_a_song"));
  CHECK(std::find(t.rounds[1].units[0].events.begin(), t.rounds[1].units[0].events.end(), Atom::past("happy")) !=
        t.rounds[1].units[0].events.end());
  CHECK(t.fixpoint);
  CHECK(t.rounds.size() <= 3);
}

TEST_CASE("evolution stops at the round limit") {
  auto c = load_system_config(test::agent_path("ping.sys"));
  c.max_evolution_rounds = 1;
  const auto t = evolve_system(c);
  CHECK(t.truncated);
  CHECK_FALSE(t.fixpoint);
}
