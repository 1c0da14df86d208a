#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace initrack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDegenerate = 3;
inline constexpr int kExitUsage = 64;

/// Runs one command line (`args` excludes the program name). Results go to
/// `out` unless --out redirects them; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace initrack::cli
