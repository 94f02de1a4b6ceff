#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ancont {

// Entry point behind the command line binary; args excludes the program
// name. Reports go to out (or the --out file), diagnostics to err. Returns
// the process exit status: 0 success, 2 configuration or validation failure,
// 3 solver non-convergence or a failed verification.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ancont
