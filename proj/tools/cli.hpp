#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mean::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDiverged = 2;

/// Runs one invocation. `args[0]` is the program name. Subcommands: train, eval, predict,
/// inspect-attention, gradcheck.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace mean::cli
