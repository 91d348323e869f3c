#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symkawa {

const char* engine_version();

// Exit codes: 0 verified, 1 falsified, 2 input error, 3 inconclusive.
enum ExitCode { kVerified = 0, kFalsified = 1, kInputError = 2, kInconclusive = 3 };

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symkawa
