#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nmext::cli {

// Full command-line driver. `args` excludes the program name; everything the
// command prints goes to `out` (plus an optional --out file). Returns the
// process exit code:
//   0  success
//   2  invariant violation (a lemma margin fired, an exact cross-check
//      disagreed, or a forgery advantage exceeded its level)
//   3  resource budget exceeded (enumeration larger than 2^24)
//  64  usage error (unknown flag / subcommand, malformed value)
int cli_run(const std::vector<std::string>& args, std::ostream& out);

} // namespace nmext::cli
