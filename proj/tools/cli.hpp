#pragma once

#include <ostream>

namespace afckf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// Entry point of the afckf tool. Subcommands:
///   run       execute the Monte Carlo benchmark and write the output bundle
///   defaults  print the fully resolved default configuration
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace afckf::cli
