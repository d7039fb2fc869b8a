#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace hypoly {

enum ExitCode : int { kExitPass = 0, kExitVerification = 2, kExitInvalid = 3, kExitCap = 4 };

inline constexpr std::size_t kRadiusCap = 8;

/// Runs one command line (argv[0] is the program name). Reports go to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, used for configuration hashes.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace hypoly
