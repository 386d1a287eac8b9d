#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evac::cli {

/// Runs one command line (args excludes the program name). Returns 0 on
/// success, 1 on a domain error, 2 on a usage error.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

int run(int argc, const char *const *argv);

} // namespace evac::cli
