#pragma once

#include <iosfwd>

namespace switchtaylor::cli {

/// Entry point of the `switchtaylor` executable. Subcommands: sets,
/// chain-stats, simulate, convergence. Returns 0 on success, 1 on invalid
/// input or configuration, 2 on a runtime failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace switchtaylor::cli
