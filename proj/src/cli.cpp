#include "dali/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "dali/mas.hpp"
#include "dali/oracle.hpp"
#include "dali/parser.hpp"
#include "dali/semantics.hpp"

namespace dali::cli {

namespace {

// Raised after diagnostics have been written; maps to exit code 3.
struct BadInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class Range>
std::string bracketed(const Range& items) {
  std::string s = "[";
  bool first = true;
  for (const auto& x : items) {
    if (!first) s += ", ";
    s += x;
    first = false;
  }
  return s + "]";
}

std::vector<std::string> performed_names(const AgentState& s) {
  std::vector<std::string> out;
  for (const auto& p : s.performed) out.push_back(p.action);
  return out;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument(what + " needs a nonnegative integer, got '" + text + "'");
  return n;
}

Strategy base_strategy() {
  Strategy s;
  if (auto n = max_steps_override()) s.max_steps = *n;
  return s;
}

AgentProgram load_agent(const std::string& path, std::ostream& err) {
  const std::string text = read_file(path);
  std::vector<SourceSpan> spans;
  AgentProgram p = parse_agent_file(text, path, &spans);
  const ValidationReport report = validate_program(p);
  for (const auto& w : report.warnings) err << path << ": warning: " << w << "\n";
  if (report.errors.empty()) return p;
  for (const auto& e : report.errors) {
    const SourceSpan at = e.clause && *e.clause < spans.size() ? spans[*e.clause] : SourceSpan{path, 1, 1};
    err << to_string(at) << ": error [" << to_string(e.rule) << "]: " << e.message << "\n";
  }
  throw BadInput("invalid program");
}

SystemConfig load_system(const std::string& path, std::ostream& err) {
  SystemConfig cfg = load_system_config(path);
  const auto errs = validate_config(cfg);
  for (const auto& e : errs) err << path << ": error: " << e << "\n";
  if (!errs.empty()) throw BadInput("invalid system");
  const Strategy base = base_strategy();
  for (const auto& a : cfg.agents)
    if (!cfg.strategies.contains(a.name)) cfg.strategies[a.name] = base;
  return cfg;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_agent_state(std::ostream& out, const Engine& e) {
  const AgentState& s = e.state();
  out << e.program().name << ":\n";
  out << "  EV: " << bracketed(s.ev) << "\n";
  out << "  IV: " << bracketed(s.iv) << "\n";
  out << "  PV: " << bracketed(s.pv) << "\n";
  out << "  performed: " << bracketed(performed_names(s)) << "\n";
}

int cmd_run(const std::string& path, const std::string& trace_file, std::optional<std::size_t> max_ticks,
            std::ostream& out, std::ostream& err) {
  SystemConfig cfg = load_system(path, err);
  if (max_ticks) cfg.max_ticks = *max_ticks;
  const SystemRunResult res = run_system(cfg);

  if (!trace_file.empty()) {
    std::ofstream f(trace_file, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + trace_file + "'");
    for (const auto& r : res.state.trace) f << trace_line(r) << "\n";
  }
  for (const auto& w : res.state.warnings) err << "warning: " << w << "\n";
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
    const AgentState& s = res.state.engines[i].state();
    out << cfg.agents[i].name << ": performed " << bracketed(performed_names(s)) << " pv " << bracketed(s.pv)
        << "\n";
  }
  out << (res.truncated ? "truncated" : "quiescent") << " after " << res.state.tick << " ticks\n";
  return res.truncated ? truncated : ok;
}

int cmd_query(const std::string& path, const std::string& atom_text, const std::string& strategy,
              const std::string& events, std::ostream& out, std::ostream& err) {
  const AgentProgram p = load_agent(path, err);
  const Atom goal = parse_atom(atom_text);
  const Strategy s = strategy.empty() ? base_strategy() : parse_strategy(strategy, base_strategy());
  EventScript inbox;
  for (const auto& e : split_csv(events)) inbox.push_back({0, p.name, e});
  const RunResult res = run(p, goal, inbox, s);
  if (res.truncated) err << "warning: step budget of " << s.max_steps << " exhausted\n";
  const bool yes = res.query_succeeded.value_or(false);
  out << (yes ? "yes" : "no") << "\n";
  return yes ? ok : failed;
}

int cmd_transform(const std::string& path, const std::string& init, std::ostream& out, std::ostream& err) {
  const AgentProgram p = load_agent(path, err);
  out << print_transformed(transform_program(p, parse_initial_situation(init)));
  return ok;
}

int cmd_model(const std::string& path, const std::string& init, std::ostream& out, std::ostream& err) {
  const AgentProgram p = load_agent(path, err);
  for (const auto& a : snapshot(p, parse_initial_situation(init))) out << a << "\n";
  return ok;
}

int cmd_oracle(const std::string& path, const std::string& events, const std::string& query,
               std::size_t max_states, std::ostream& out, std::ostream& err) {
  const AgentProgram p = load_agent(path, err);
  std::optional<Atom> q;
  if (!query.empty()) q = parse_atom(query);
  const auto res = oracle::exhaustive_interleavings(p, split_csv(events), q, {max_states});
  for (const auto& o : res.outcomes) out << "performed " << bracketed(o.performed) << " pv " << bracketed(o.pv) << "\n";
  out << "explored " << res.explored << (res.truncated ? " (truncated)" : "") << "\n";
  return res.truncated ? truncated : ok;
}

// ---------------------------------------------------------------------------

class Repl {
 public:
  Repl(SystemConfig cfg, std::ostream& out, std::ostream& err)
      : cfg_(std::move(cfg)), state_(make_system_state(cfg_)), out_(out), err_(err) {
    cfg_.step_budget = 1;
  }

  int loop(std::istream& in) {
    out_ << "agents: ";
    for (std::size_t i = 0; i < cfg_.agents.size(); ++i) out_ << (i ? ", " : "") << cfg_.agents[i].name;
    out_ << "\n";
    for (std::string line; prompt(), std::getline(in, line);) {
      std::istringstream words(line);
      std::vector<std::string> w;
      for (std::string x; words >> x;) w.push_back(x);
      if (w.empty()) continue;
      try {
        if (w[0] == "quit" || w[0] == "exit") return ok;
        command(w);
      } catch (const std::exception& e) {
        err_ << "error: " << e.what() << "\n";
      }
    }
    return ok;
  }

 private:
  void prompt() { out_ << "dali> " << std::flush; }

  std::size_t agent(const std::string& name) const {
    if (auto i = cfg_.find(name)) return *i;
    throw std::invalid_argument("unknown agent '" + name + "'");
  }

  void command(const std::vector<std::string>& w) {
    const std::string& c = w[0];
    if (c == "help") {
      out_ << "inject <agent> <event> | step [n] | state <agent> | query <agent> <atom> | quit\n";
    } else if (c == "inject" && w.size() == 3) {
      const std::size_t i = agent(w[1]);
      state_.engines[i].inject(w[2]);
      state_.inbox_history[i].push_back({state_.tick, w[2], "repl"});
    } else if (c == "step" && w.size() <= 2) {
      const std::size_t n = w.size() == 2 ? parse_count(w[1], "step") : 1;
      // One REPL step lets every agent take at most one engine step.
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t before = state_.trace.size();
        system_tick(state_, cfg_);
        for (std::size_t r = before; r < state_.trace.size(); ++r) out_ << trace_line(state_.trace[r]) << "\n";
      }
      for (const auto& wmsg : state_.warnings) err_ << "warning: " << wmsg << "\n";
      state_.warnings.clear();
    } else if (c == "state" && w.size() == 2) {
      print_agent_state(out_, state_.engines[agent(w[1])]);
    } else if (c == "query" && w.size() == 3) {
      // Queries run on a copy so the live agent is not disturbed.
      Engine probe = state_.engines[agent(w[1])];
      const std::size_t idx = probe.add_query(parse_atom(w[2]));
      while (probe.goal()[idx].status == Status::active && probe.step()) {
      }
      out_ << (probe.goal()[idx].status == Status::succeeded ? "yes" : "no") << "\n";
    } else {
      throw std::invalid_argument("bad command '" + c + "'; try 'help'");
    }
  }

  SystemConfig cfg_;
  SystemState state_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

std::optional<std::size_t> max_steps_override() {
  const char* v = std::getenv("DALI_MAX_STEPS");
  if (!v) return std::nullopt;
  std::string_view s(v);
  std::size_t n = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || ptr != s.data() + s.size() || n == 0) return std::nullopt;
  return n;
}

Strategy parse_strategy(const std::string& text, Strategy base) {
  for (const auto& item : split_csv(text)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("strategy entry '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::size_t v = parse_count(item.substr(eq + 1), "strategy " + key);
    if (key == "k") {
      base.event_check_period = v;
    } else if (key == "m") {
      if (v == 0) throw std::invalid_argument("strategy m must be positive");
      base.internal_check_period = v;
    } else if (key == "max") {
      base.max_steps = v;
    } else {
      throw std::invalid_argument("unknown strategy key '" + key + "'");
    }
  }
  return base;
}

int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"DALI reactive agent interpreter", "dali"};
  app.require_subcommand(1);

  std::string path, atom, trace_file, strategy, init, events, query;
  std::optional<std::size_t> max_ticks;
  std::size_t max_states = 100000;

  auto* run_cmd = app.add_subcommand("run", "Run a multi-agent system to quiescence");
  run_cmd->add_option("system", path, "System file")->required();
  run_cmd->add_option("--trace", trace_file, "Write the JSON-lines trace here");
  run_cmd->add_option("--max-ticks", max_ticks, "Tick limit");

  auto* query_cmd = app.add_subcommand("query", "Prove an atom against one agent");
  query_cmd->add_option("agent", path, "Agent file")->required();
  query_cmd->add_option("atom", atom, "Goal atom")->required();
  query_cmd->add_option("--strategy", strategy, "k=K,m=M[,max=N]");
  query_cmd->add_option("--events", events, "External events present at the start, comma separated");

  auto* transform_cmd = app.add_subcommand("transform", "Print the transformed Horn program");
  transform_cmd->add_option("agent", path, "Agent file")->required();
  transform_cmd->add_option("--init", init, "Initial events, e.g. e1,past(e2)");

  auto* model_cmd = app.add_subcommand("model", "Print the snapshot least model");
  model_cmd->add_option("agent", path, "Agent file")->required();
  model_cmd->add_option("--init", init, "Initial events, e.g. e1,past(e2)");

  auto* repl_cmd = app.add_subcommand("repl", "Interactive session on a system");
  repl_cmd->add_option("system", path, "System file")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Enumerate reachable outcomes");
  oracle_cmd->group("");
  oracle_cmd->add_option("agent", path, "Agent file")->required();
  oracle_cmd->add_option("--events", events, "Pending external events");
  oracle_cmd->add_option("--query", query, "Initial query");
  oracle_cmd->add_option("--max-states", max_states, "State bound");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : bad_input;
  }

  try {
    if (*run_cmd) return cmd_run(path, trace_file, max_ticks, out, err);
    if (*query_cmd) return cmd_query(path, atom, strategy, events, out, err);
    if (*transform_cmd) return cmd_transform(path, init, out, err);
    if (*model_cmd) return cmd_model(path, init, out, err);
    if (*oracle_cmd) return cmd_oracle(path, events, query, max_states, out, err);
    if (*repl_cmd) return Repl(load_system(path, err), out, err).loop(in);
  } catch (const BadInput&) {
    return bad_input;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return bad_input;
  } catch (const ProgramError& e) {
    for (const auto& v : e.report().errors) err << "error [" << to_string(v.rule) << "]: " << v.message << "\n";
    return bad_input;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return bad_input;
  }
  return bad_input;
}

}  // namespace dali::cli
