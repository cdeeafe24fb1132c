#ifndef CRJET_CLI_HPP
#define CRJET_CLI_HPP

#include <iosfwd>
#include <string>

namespace crjet
{

inline constexpr const char *tool_version = "crjet 0.1.0";

// Exit codes of the command-line front end.
enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,  // a mathematical check failed
    exit_input_error = 2,   // unreadable or malformed input, bad flags
    exit_truncation = 3,    // the truncation budget is insufficient
};

// Runs one command (check, normal-form, blowup, lift, probe, pipeline). The
// report goes to out, diagnostics to err; with --out DIR the report and the
// intermediate artifacts are also written to DIR.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace crjet

#endif
