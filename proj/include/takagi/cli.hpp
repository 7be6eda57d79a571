#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace takagi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

inline constexpr int kSchemaVersion = 1;

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (or to --out, written atomically); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace takagi::cli
