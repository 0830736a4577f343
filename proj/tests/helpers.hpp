#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dali/engine.hpp"
#include "dali/parser.hpp"

namespace dali::test {

inline std::string agent_path(const std::string& file) { return std::string(DALI_AGENTS_DIR) + "/" + file; }

inline AgentProgram load(const std::string& file) {
  return parse_agent_file(read_file(agent_path(file)), file);
}

inline std::vector<std::string> performed(const AgentState& s) {
  std::vector<std::string> out;
  for (const auto& p : s.performed) out.push_back(p.action);
  return out;
}

inline std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

inline EventScript at_start(const std::string& agent, const std::vector<std::string>& events) {
  EventScript s;
  for (const auto& e : events) s.push_back({0, agent, e});
  return s;
}

}  // namespace dali::test
