#include <doctest.h>

#include <random>

#include "dali/oracle.hpp"
#include "dali/parser.hpp"
#include "helpers.hpp"

using namespace dali;

TEST_CASE("Henry source parses into two clauses with roles") {
  const auto p = parse_agent_file(
      "agent Henry. @internal happy. @action sing_a_song. happy :- sunny_day. happy :> sing_a_song.");
  CHECK(p.name == "Henry");
  REQUIRE(p.clauses.size() == 2);
  CHECK(p.clauses[0].kind == ClauseKind::ordinary);
  CHECK(p.clauses[1].kind == ClauseKind::reactive);
  CHECK(p.clauses[1].body == std::vector<Atom>{Atom("sing_a_song")});
  CHECK(p.internals == NameSet{"happy"});
  CHECK(p.actions == NameSet{"sing_a_song"});
  CHECK(p.externals.empty());
}

TEST_CASE("header alone gives an empty program") {
  const auto p = parse_agent_file("agent A.");
  CHECK(p.name == "A");
  CHECK(p.clauses.empty());
  CHECK(p.externals.empty());
  CHECK(p.internals.empty());
  CHECK(p.actions.empty());
}

TEST_CASE("now() and past() markers") {
  const auto mary = test::load("mary.dali");
  CHECK(mary.clauses[0].body[0] == Atom::now("alarm_clock_rings"));
  const auto george = test::load("george.dali");
  CHECK(george.clauses[0].body[0] == Atom::past("girlfriend_call"));
  CHECK(parse_atom("now(x)").marker == Marker::present);
  CHECK(parse_atom("past(x)").marker == Marker::past);
  CHECK(parse_atom("x").is_plain());
}

TEST_CASE("action rules and comments") {
  const auto p = parse_agent_file("agent A. % comment\n@action a.\na :< b, c. % trailing\n");
  REQUIRE(p.clauses.size() == 1);
  CHECK(p.clauses[0].kind == ClauseKind::action);
  CHECK(p.clauses[0].body.size() == 2);
}

TEST_CASE("syntax errors carry a source span") {
  auto span_of = [](const char* text) {
    try {
      parse_agent_file(text, "t.dali");
    } catch (const ParseError& e) {
      return e.span();
    }
    FAIL("expected a parse error");
    return SourceSpan{};
  };
  CHECK(span_of("agnt A.").line == 1);
  const auto s = span_of("agent A.\np.\n@external e.\n");
  CHECK(s.line == 3);
  CHECK(s.column == 1);
  CHECK(s.file == "t.dali");
  CHECK(span_of("agent A.\n@bogus x.").column == 2);
  CHECK(span_of("agent A.\np :- past(now(x)).").line == 2);
  CHECK(span_of("agent A.\np :- later(x).").column == 6);
  CHECK(span_of("agent A.\np :- q").line == 2);
  CHECK_THROWS_AS(parse_atom("p q"), ParseError);
}

TEST_CASE("clause spans point at clause heads") {
  std::vector<SourceSpan> spans;
  parse_agent_file("agent A.\n@action a.\n\np.\n  q :- p.\n", "f", &spans);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].line == 4);
  CHECK(spans[1].line == 5);
  CHECK(spans[1].column == 3);
}

TEST_CASE("event scripts") {
  CHECK(parse_event_script("0 Mary alarm_clock_rings") == EventScript{{0, "Mary", "alarm_clock_rings"}});
  CHECK(parse_event_script("0 A danger\n3 A danger") == EventScript{{0, "A", "danger"}, {3, "A", "danger"}});
  CHECK(parse_event_script("# header\n\n1 A x  # note\n").size() == 1);
  CHECK_THROWS_AS(parse_event_script("5 A x\n2 A y"), ParseError);
  CHECK_THROWS_AS(parse_event_script("x A y"), ParseError);
  CHECK_THROWS_AS(parse_event_script("1 A"), ParseError);
  CHECK_THROWS_AS(parse_event_script("1 A b c"), ParseError);
}

TEST_CASE("printing then parsing gives the same program") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const AgentProgram p = oracle::random_agent_program(rng);
    const std::string text = print_program(p);
    CAPTURE(text);
    CHECK(parse_agent_file(text) == p);
  }
  for (const char* f : {"mary.dali", "anne.dali", "danger.dali", "george.dali", "empty.dali"}) {
    const auto p = test::load(f);
    CHECK(parse_agent_file(print_program(p)) == p);
  }
}
