#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pvt::cli {

/// Runs one command line and returns the process exit code: 0 success,
/// 1 usage or validation, 2 I/O or schema, 3 numerical failure.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pvt::cli
