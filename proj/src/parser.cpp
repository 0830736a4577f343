#include "dali/parser.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace dali {

std::string to_string(const SourceSpan& s) {
  return s.file + ":" + std::to_string(s.line) + ":" + std::to_string(s.column);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

enum class Tok { ident, dot, comma, lparen, rparen, if_, react, act, at, end };

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::ident:
      return "identifier";
    case Tok::dot:
      return "'.'";
    case Tok::comma:
      return "','";
    case Tok::lparen:
      return "'('";
    case Tok::rparen:
      return "')'";
    case Tok::if_:
      return "':-'";
    case Tok::react:
      return "':>'";
    case Tok::act:
      return "':<'";
    case Tok::at:
      return "'@'";
    case Tok::end:
      return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::string_view file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      SourceSpan here = span();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::end, "", here});
        return out;
      }
      char c = src_[pos_];
      if (is_ident_start(c)) {
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        out.push_back({Tok::ident, std::string(src_.substr(start, pos_ - start)), here});
        continue;
      }
      switch (c) {
        case '.':
          advance();
          out.push_back({Tok::dot, ".", here});
          continue;
        case ',':
          advance();
          out.push_back({Tok::comma, ",", here});
          continue;
        case '(':
          advance();
          out.push_back({Tok::lparen, "(", here});
          continue;
        case ')':
          advance();
          out.push_back({Tok::rparen, ")", here});
          continue;
        case '@':
          advance();
          out.push_back({Tok::at, "@", here});
          continue;
        case ':':
          if (pos_ + 1 < src_.size()) {
            char n = src_[pos_ + 1];
            Tok k = n == '-' ? Tok::if_ : n == '>' ? Tok::react : n == '<' ? Tok::act : Tok::end;
            if (k != Tok::end) {
              advance();
              advance();
              out.push_back({k, std::string(src_.substr(pos_ - 2, 2)), here});
              continue;
            }
          }
          break;
        default:
          break;
      }
      throw ParseError(here, std::string("unexpected character '") + c + "'");
    }
  }

 private:
  static bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        return;
      }
    }
  }

  SourceSpan span() const { return {std::string(file_), line_, col_}; }

  std::string_view src_;
  std::string_view file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AgentProgram file(std::vector<SourceSpan>* spans) {
    AgentProgram p;
    const Token& kw = expect(Tok::ident);
    if (kw.text != "agent") throw ParseError(kw.span, "expected header 'agent Name.'");
    p.name = expect(Tok::ident).text;
    expect(Tok::dot);

    bool seen_clause = false;
    while (peek().kind != Tok::end) {
      if (peek().kind == Tok::at) {
        if (seen_clause) throw ParseError(peek().span, "directives must precede clauses");
        directive(p);
      } else {
        if (spans) spans->push_back(peek().span);
        p.clauses.push_back(clause());
        seen_clause = true;
      }
    }
    return p;
  }

  Atom single_atom() {
    Atom a = body_atom();
    if (peek().kind != Tok::end) throw ParseError(peek().span, "trailing input after atom");
    return a;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  const Token& expect(Tok k) {
    const Token& t = toks_[pos_];
    if (t.kind != k) {
      std::string got = t.kind == Tok::ident ? "'" + t.text + "'" : std::string(describe(t.kind));
      throw ParseError(t.span, "expected " + std::string(describe(k)) + ", got " + got);
    }
    ++pos_;
    return t;
  }

  void directive(AgentProgram& p) {
    expect(Tok::at);
    const Token& name = expect(Tok::ident);
    const std::string atom = expect(Tok::ident).text;
    expect(Tok::dot);
    if (name.text == "external")
      p.externals.insert(atom);
    else if (name.text == "internal")
      p.internals.insert(atom);
    else if (name.text == "action")
      p.actions.insert(atom);
    else
      throw ParseError(name.span, "unknown directive '@" + name.text + "'");
  }

  Clause clause() {
    Clause c;
    c.head = expect(Tok::ident).text;
    Tok arrow = peek().kind;
    if (arrow == Tok::if_ || arrow == Tok::react || arrow == Tok::act) {
      ++pos_;
      c.kind = arrow == Tok::if_ ? ClauseKind::ordinary : arrow == Tok::react ? ClauseKind::reactive : ClauseKind::action;
      c.body.push_back(body_atom());
      while (peek().kind == Tok::comma) {
        ++pos_;
        c.body.push_back(body_atom());
      }
    }
    expect(Tok::dot);
    return c;
  }

  Atom body_atom() {
    const Token& id = expect(Tok::ident);
    if (peek().kind != Tok::lparen) return Atom(id.text);
    if (id.text != "past" && id.text != "now") throw ParseError(id.span, "unknown marker '" + id.text + "'");
    ++pos_;
    const Token& inner = peek();
    if (inner.kind != Tok::ident)
      throw ParseError(inner.span, "marker " + id.text + "(..) must be applied to an identifier");
    ++pos_;
    if (peek().kind == Tok::lparen)
      throw ParseError(peek().span, "marker " + id.text + "(..) must be applied to an identifier");
    expect(Tok::rparen);
    return Atom(inner.text, id.text == "past" ? Marker::past : Marker::present);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

AgentProgram parse_agent_file(std::string_view text, std::string_view file, std::vector<SourceSpan>* clause_spans) {
  return Parser(Lexer(text, file).run()).file(clause_spans);
}

Atom parse_atom(std::string_view text) { return Parser(Lexer(text, "<atom>").run()).single_atom(); }

EventScript parse_event_script(std::string_view text, std::string_view file) {
  EventScript out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::pair<std::string_view, std::size_t>> fields;  // text, column
    for (std::size_t i = 0; i < line.size();) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      fields.emplace_back(line.substr(i, j - i), i + 1);
      i = j;
    }
    if (fields.empty()) continue;

    auto at = [&](std::size_t col) { return SourceSpan{std::string(file), line_no, col}; };
    if (fields.size() != 3)
      throw ParseError(at(fields.front().second), "expected 'TICK AGENT EVENT', got " +
                                                      std::to_string(fields.size()) + " field(s)");

    const auto [tick_text, tick_col] = fields[0];
    std::size_t tick = 0;
    auto [ptr, ec] = std::from_chars(tick_text.data(), tick_text.data() + tick_text.size(), tick);
    if (ec != std::errc() || ptr != tick_text.data() + tick_text.size())
      throw ParseError(at(tick_col), "tick '" + std::string(tick_text) + "' is not a nonnegative integer");
    if (!out.empty() && tick < out.back().tick)
      throw ParseError(at(tick_col), "tick " + std::to_string(tick) + " is earlier than preceding tick " +
                                         std::to_string(out.back().tick));
    if (!is_identifier(fields[1].first))
      throw ParseError(at(fields[1].second), "agent '" + std::string(fields[1].first) + "' is not an identifier");
    if (!is_identifier(fields[2].first))
      throw ParseError(at(fields[2].second), "event '" + std::string(fields[2].first) + "' is not an identifier");

    out.push_back({tick, std::string(fields[1].first), std::string(fields[2].first)});
  }
  return out;
}

std::string print_program(const AgentProgram& p) {
  std::ostringstream os;
  os << "agent " << p.name << ".\n";
  for (const auto& e : p.externals) os << "@external " << e << ".\n";
  for (const auto& e : p.internals) os << "@internal " << e << ".\n";
  for (const auto& e : p.actions) os << "@action " << e << ".\n";
  for (const auto& c : p.clauses) {
    os << c.head;
    if (!c.body.empty() || c.kind != ClauseKind::ordinary) {
      os << (c.kind == ClauseKind::ordinary ? " :- " : c.kind == ClauseKind::reactive ? " :> " : " :< ");
      for (std::size_t i = 0; i < c.body.size(); ++i) os << (i ? ", " : "") << to_string(c.body[i]);
    }
    os << ".\n";
  }
  return os.str();
}

}  // namespace dali
