#pragma once

#include <ostream>

namespace curvflow::cli {

// Entry point of the curvflow command line. Returns the process exit code:
// 0 success, 1 usage/parse/dimension errors, 2 positivity failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Reads CURVFLOW_LOG (quiet|info|debug) and routes log output to stderr.
void configure_logging();

}  // namespace curvflow::cli
