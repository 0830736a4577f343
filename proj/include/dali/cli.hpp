#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dali/engine.hpp"

namespace dali::cli {

enum Exit : int { ok = 0, failed = 1, truncated = 2, bad_input = 3 };

/// Runs one `dali` invocation. `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`; `in` feeds the REPL.
int dispatch(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Parses `k=K,m=M[,max=N]` on top of `base`.
Strategy parse_strategy(const std::string& text, Strategy base = {});

/// Value of DALI_MAX_STEPS, when set to a positive integer.
std::optional<std::size_t> max_steps_override();

}  // namespace dali::cli
