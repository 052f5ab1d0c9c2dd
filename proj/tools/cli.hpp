#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pgsos::cli {

enum ExitCode : int { ok = 0, refused = 1, usage = 2 };

/// Runs one `pgsos` invocation; `args` excludes the program name. Reports go
/// to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a, 64 bit, as 16 lower-case hex digits.
std::string fnv1a64(std::string_view bytes);

}  // namespace pgsos::cli
