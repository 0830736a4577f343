#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dali/program.hpp"

namespace dali {

struct SourceSpan {
  std::string file;
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based
};

std::string to_string(const SourceSpan& s);

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, const std::string& msg)
      : std::runtime_error(to_string(span) + ": " + msg), span_(std::move(span)) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

struct ScriptEntry {
  std::size_t tick = 0;
  std::string agent;
  std::string event;

  bool operator==(const ScriptEntry&) const = default;
};

/// Timed event injections. Ticks are nondecreasing in file order.
using EventScript = std::vector<ScriptEntry>;

/// Parses one `.dali` agent file:
///
///   agent Name.
///   @external e.   @internal i.   @action a.
///   h.   h :- b1, b2.   e :> r1.   a :< c1.
///
/// Body atoms are identifiers or `past(x)` / `now(x)`; `%` starts a comment.
/// When `clause_spans` is given it receives the position of every clause head.
AgentProgram parse_agent_file(std::string_view text, std::string_view file = "<input>",
                              std::vector<SourceSpan>* clause_spans = nullptr);

/// Parses a single body atom such as `p`, `past(e)` or `now(e)`.
Atom parse_atom(std::string_view text);

/// Parses `TICK AGENT EVENT` lines; `#` starts a comment.
EventScript parse_event_script(std::string_view text, std::string_view file = "<script>");

/// Renders a program in `.dali` syntax. Reparsing the output yields an equal program.
std::string print_program(const AgentProgram& p);

std::string read_file(const std::string& path);

}  // namespace dali
