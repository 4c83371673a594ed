#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cuspsieve {

// Runs one CLI invocation; args excludes the program name. Returns the
// process exit code: 0 success, 1 verification violation, 2 usage or parse
// error, 3 I/O error.
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace cuspsieve
