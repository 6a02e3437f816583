#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ewens::cli {

/// Runs the command-line driver on the given argument list (program name
/// excluded).  Artifacts go to `out` unless an --out path redirects them;
/// diagnostics go to `err`.
///
/// Exit codes: 0 success, 1 internal error, 2 usage error, 3 validation
/// error (malformed spec or config, failed verification), 4 domain error
/// (mathematical precondition violated), 5 resource-guard error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ewens::cli
