#pragma once

#include <iosfwd>

namespace quotrep {

/// Full command-line front end; returns the process exit status
/// (0 = success / all checks pass, 1 = check failure, 2 = usage error).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quotrep
