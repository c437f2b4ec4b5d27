#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace paultrap::cli {

enum ExitCode { kOk = 0, kUsage = 1, kSchema = 2, kPhysics = 3, kCheckFailed = 4 };

/// Entry point of the `paultrap` executable; arguments exclude the program name.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace paultrap::cli
