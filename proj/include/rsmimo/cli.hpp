#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rsmimo {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

/// Runs the front end on argv-style arguments (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Grid from "start:stop:linN" or "start:stop:logN" (N points, both ends included).
/// Throws std::invalid_argument on malformed or empty specs.
std::vector<double> parse_range(const std::string& spec);

/// "low:high" bracket. Throws std::invalid_argument when malformed.
std::pair<double, double> parse_bracket(const std::string& spec);

}  // namespace rsmimo
