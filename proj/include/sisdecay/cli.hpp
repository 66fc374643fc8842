#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sisdecay {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 ok, 1 validation failure, 2 usage error, 3 precision exhausted.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitUsage = 2, kExitPrecision = 3 };

/// Runs one invocation; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace sisdecay
