#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sai/decide.hpp"
#include "sai/falsify.hpp"

namespace sai {

inline constexpr const char* kReportSchema = "saicheck.report/1";

/// Options shared by the saicheck subcommands.
struct CommandOptions {
  std::string problem_path;
  std::vector<std::string> assignments;  // "name=value"
  SolverConfig solver;
  bool json = false;
  std::string emit_path;
  std::string grid;
  std::string strategy = "grid";
  std::string qe_command;
  bool qe = false;          // emit: QE script instead of SMT-LIB
  std::string poly;         // lie/rank/trans: polynomial text
  unsigned order = 2;       // lie: highest derivative
  SampleBudget budget;
  std::string csv_path;
};

/// Each command returns the process exit code; 3 for usage, input or
/// configuration errors (reported on `err`).
int cmd_lie(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_rank(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_trans(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_falsify(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_emit(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// "a=-1" assignments covering every parameter exactly once.
Point parse_assignments(const std::vector<std::string>& items, const std::vector<std::string>& params);

}  // namespace sai
