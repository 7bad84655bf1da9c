#pragma once

// The `emp` command line: one subcommand per invocation, each producing a RunReport
// (JSON envelope) or a CSV table.

#include <iosfwd>
#include <string>
#include <vector>

namespace emp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerification = 3;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version_string();

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace emp::cli
