#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace qmf::cli {

/// Runs the command line given argv-style arguments (program name first).
/// Reports go to `out`, diagnostics to `err`. Exit codes: 0 success,
/// 1 failed check, 2 usage or parse error.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace qmf::cli
