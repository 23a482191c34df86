#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlidl::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_compile = 2, exit_runtime = 3 };

/// `mlidl compile|check|run-demo ...` without the program name. Normal output
/// goes to `out`, diagnostics and usage text to `err`. With MLIDL_TRACE=1 in
/// the environment, run-demo also writes the word-memory trace to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlidl::cli
