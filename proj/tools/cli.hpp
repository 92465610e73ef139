#pragma once

#include <iosfwd>

namespace poa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // unexpected internal error
inline constexpr int kExitNoPath = 2;   // a leg had no path or no stable path
inline constexpr int kExitUsage = 64;
inline constexpr int kExitIo = 74;

/// Runs `poa <generate|plan|bench> ...`. Normal output goes to `out`,
/// diagnostics and logs to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace poa::cli
