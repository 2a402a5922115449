// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gconvplan::cli {

/// Exit codes of the command-line surface.
enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 2,
    exit_calibration = 3,
    exit_usage = 64,
};

/// Run one CLI invocation. args excludes the program name. Normal output
/// goes to out (or to --out when given); errors and usage go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gconvplan::cli
