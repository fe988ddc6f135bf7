#pragma once

#include <iosfwd>

namespace tvgmd::cli {

// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_not_converged = 3;

/// Entry point shared by the tvgmd binary and the tests. argv[0] is the
/// program name, argv[1] the subcommand (synth, decompose, inspect).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tvgmd::cli
