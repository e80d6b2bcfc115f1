#pragma once

#include <iosfwd>

namespace spde_mlmc::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Parses arguments, runs the subcommand and writes its files. Returns the
/// process exit code; never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spde_mlmc::cli
