#pragma once

#include <iosfwd>

namespace pvfc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Parses argv and runs one subcommand. Data goes to files (and `out`),
/// diagnostics to `err`.
int cmd_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pvfc::cli
