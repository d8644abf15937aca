// cli.hpp - command-line entry point.
//
// Exit codes: 0 ok, 1 selftest failure, 2 config error, 3 numerical error.

#pragma once

#include <ostream>

namespace psm::app {

enum ExitCode : int { Ok = 0, SelftestFailure = 1, ConfigFailure = 2, NumericalFailure = 3 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace psm::app
