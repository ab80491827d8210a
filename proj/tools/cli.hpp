#pragma once

#include <iosfwd>

namespace metaphor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `metaphor` tool: train, eval, baseline, cv, predict.
/// Returns 0 on success, 1 on runtime failure, 2 on usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace metaphor::cli
