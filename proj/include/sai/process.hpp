#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sai {

struct ProcessResult {
  enum class Status { Exited, Signaled, TimedOut, LaunchFailed };
  Status status = Status::LaunchFailed;
  int exit_code = -1;
  std::string out;
  std::string err;
  double seconds = 0;
};

/// Splits a command line on whitespace; single and double quotes group.
std::vector<std::string> split_command(std::string_view command);

/// Runs argv[0] (searched on PATH) with `input` on stdin, collecting stdout
/// and stderr. The child is killed once `timeout_s` of wall-clock time pass.
ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input, double timeout_s);

}  // namespace sai
