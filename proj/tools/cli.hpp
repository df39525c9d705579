#pragma once

#include <iosfwd>

namespace gkp::cli {

// Runs one subcommand. Returns 0 on success, 1 on a domain error and 2 on a
// usage error; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gkp::cli
