#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mrt {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitDomainError = 1, kExitUsageError = 2 };

/// Runs one command line (argv[0] is the program name). Data goes to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1..8" or "1,3,8" -> sorted list of orders.
std::vector<int> parse_order_list(const std::string& text);

}  // namespace mrt
