#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ralab/harness.hpp"

namespace ralab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// "inf" (any case) maps to kInfiniteAlpha.
double parse_alpha(const std::string& text);

/// NAME=START:STOP:STEP, values START, START+STEP, .. up to STOP inclusive.
Sweep parse_vary(const std::string& text);

/// Entry point of the `ralab` executable. `args` excludes the program name.
/// Results written to "-" go to `out`; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ralab
