#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reskit {

// Exit statuses of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_usage = 2, exit_numerical = 3, exit_precondition = 4 };

// args excludes the program name. Documents go to `out` unless --output is given.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Writes via a temporary file in the same directory and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace reskit
