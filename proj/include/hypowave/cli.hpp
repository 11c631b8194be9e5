#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypowave::cli {

enum ExitCode : int { kPass = 0, kViolated = 1, kUsage = 2 };

// args excludes the program name. Artifacts go to --out (default ".").
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypowave::cli
