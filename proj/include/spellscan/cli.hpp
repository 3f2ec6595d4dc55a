#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace spellscan {

// Runs one spellscan command. `args` excludes the program name. Returns the
// process exit code: 0 on success, 2 on usage errors, 1 on any other
// failure, with a single "error: <kind>: <message>" line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spellscan
