#pragma once

// Brute-force reference implementations for testing. Nothing here shares
// code with the engine or the least-model kernels it checks.

#include <cstddef>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dali/program.hpp"
#include "dali/semantics.hpp"

namespace dali::oracle {

/// Iterates the immediate-consequence operator from the empty set until it
/// stops changing.
HerbrandModel naive_fixpoint(const std::vector<HornClause>& clauses);

struct Outcome {
  std::vector<std::string> performed;  // sorted multiset of performed actions
  std::set<std::string> pv;

  auto operator<=>(const Outcome&) const = default;
};

struct ReachabilityResult {
  std::set<Outcome> outcomes;  // one per reachable quiescent state
  std::size_t explored = 0;
  bool truncated = false;

  bool reachable(const Outcome& o) const { return outcomes.contains(o); }
};

struct Bounds {
  std::size_t max_states = 100000;
};

/// Enumerates every interleaving of the six resolution cases, every selected
/// atom and every clause choice (with chronological backtracking) from an
/// initial state where `inbox` is pending and `query`, if given, is the only
/// component goal.
ReachabilityResult exhaustive_interleavings(const AgentProgram& p, const std::vector<std::string>& inbox,
                                            const std::optional<Atom>& query = std::nullopt, Bounds bounds = {});

/// Pure program (no roles, no markers) over atoms a0..a{atoms-1}.
AgentProgram random_pure_program(std::mt19937_64& rng, std::size_t max_atoms, std::size_t max_clauses);

/// Program with random roles and clause kinds that satisfies validate_program.
AgentProgram random_agent_program(std::mt19937_64& rng);

/// Clauses of a pure program as plain Horn clauses.
std::vector<HornClause> horn_clauses(const AgentProgram& p);

}  // namespace dali::oracle
