#pragma once

#include <iosfwd>

namespace sdist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the `sdist` command line tool. Subcommands: gen, dist,
/// sweep, fit. Normal output goes to `out` unless --out names a file;
/// diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace sdist::cli
