// saicheck: semi-algebraic continuous invariant checker.

#include <CLI11.hpp>

#include <iostream>

#include "sai/commands.hpp"

namespace {

void add_problem(CLI::App* cmd, sai::CommandOptions& o) {
  cmd->add_option("problem", o.problem_path, "Problem file")->required();
}

void add_solver(CLI::App* cmd, sai::CommandOptions& o) {
  cmd->add_option("--solver-cmd", o.solver.command, "SMT-LIB solver command reading a script on stdin")
      ->capture_default_str();
  cmd->add_option("--timeout", o.solver.timeout_s, "Seconds per solver query")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", o.solver.workers, "Concurrent solver queries")->capture_default_str();
  cmd->add_option("--logic", o.solver.logic, "SMT-LIB logic for validity queries")->capture_default_str();
  cmd->add_option("--transcripts", o.solver.transcript_dir, "Directory receiving query scripts and replies");
}

void add_params(CLI::App* cmd, sai::CommandOptions& o) {
  cmd->add_option("-p,--param", o.assignments, "Parameter value, name=value (repeatable)");
}

void add_max_order(CLI::App* cmd, sai::CommandOptions& o) {
  cmd->add_option("--max-order", o.solver.max_order, "Cap on the Lie-derivative fixed-point search")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check and generate semi-algebraic continuous invariants of polynomial systems"};
  app.require_subcommand(1);
  sai::CommandOptions o;

  auto* lie = app.add_subcommand("lie", "Print the Lie-derivative chain of a polynomial");
  add_problem(lie, o);
  lie->add_option("--poly", o.poly, "Polynomial (default: the invariant's polynomial)");
  lie->add_option("-k,--order", o.order, "Highest derivative")->capture_default_str();

  auto* rank = app.add_subcommand("rank", "Compute the rank bound N of a polynomial");
  add_problem(rank, o);
  rank->add_option("--poly", o.poly, "Polynomial (default: the invariant's polynomial)");
  add_max_order(rank, o);

  auto* trans = app.add_subcommand("trans", "Print the transverse and entry formulas of a polynomial");
  add_problem(trans, o);
  trans->add_option("--poly", o.poly, "Polynomial (default: the invariant's polynomial)");
  add_max_order(trans, o);

  auto* check = app.add_subcommand("check", "Decide whether the invariant is a continuous invariant");
  add_problem(check, o);
  add_params(check, o);
  add_solver(check, o);
  add_max_order(check, o);
  check->add_flag("--json", o.json, "Machine-readable report");

  auto* generate = app.add_subcommand("generate", "Find parameter values making the template an invariant");
  add_problem(generate, o);
  add_solver(generate, o);
  add_max_order(generate, o);
  generate->add_option("--strategy", o.strategy, "grid, existential or qe-script")
      ->capture_default_str()
      ->check(CLI::IsMember({"grid", "existential", "qe-script"}));
  generate->add_option("--grid", o.grid, "Parameter grid, e.g. a=-2:2:1,b=-1:1:1");
  generate->add_option("--qe-cmd", o.qe_command, "QE tool run as '<cmd> <script>' (qe-script strategy)");
  generate->add_option("--emit", o.emit_path, "Where to write the QE script (qe-script strategy)");
  generate->add_flag("--json", o.json, "Machine-readable report");

  auto* falsify = app.add_subcommand("falsify", "Search for numerical counterexamples by simulation");
  add_problem(falsify, o);
  add_params(falsify, o);
  falsify->add_option("--samples", o.budget.n_init_points, "Initial points")->capture_default_str();
  falsify->add_option("--horizon", o.budget.horizon, "Time horizon T")->capture_default_str()->check(CLI::PositiveNumber);
  falsify->add_option("--step", o.budget.step, "RK4 step h")->capture_default_str()->check(CLI::PositiveNumber);
  falsify->add_option("--tolerance", o.budget.tolerance, "Violation margin")->capture_default_str()->check(CLI::PositiveNumber);
  falsify->add_option("--seed", o.budget.seed, "Sampling seed")->capture_default_str();
  falsify->add_option("--box", o.budget.box, "Sampling half-width for free variables")->capture_default_str();
  falsify->add_option("--workers", o.budget.workers, "Concurrent trajectories")->capture_default_str();
  falsify->add_option("--csv", o.csv_path, "Write a trajectory (time, state) as CSV");

  auto* emit = app.add_subcommand("emit", "Write the solver script(s) without running a solver");
  add_problem(emit, o);
  add_params(emit, o);
  add_max_order(emit, o);
  emit->add_option("--emit,-o", o.emit_path, "Output path ('-' for stdout)");
  emit->add_option("--logic", o.solver.logic, "SMT-LIB logic")->capture_default_str();
  emit->add_flag("--qe", o.qe, "Write a QE script for the template instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sai::kUsageExitCode;
  }

  if (*lie) return sai::cmd_lie(o, std::cout, std::cerr);
  if (*rank) return sai::cmd_rank(o, std::cout, std::cerr);
  if (*trans) return sai::cmd_trans(o, std::cout, std::cerr);
  if (*check) return sai::cmd_check(o, std::cout, std::cerr);
  if (*generate) return sai::cmd_generate(o, std::cout, std::cerr);
  if (*falsify) return sai::cmd_falsify(o, std::cout, std::cerr);
  if (*emit) return sai::cmd_emit(o, std::cout, std::cerr);
  return sai::kUsageExitCode;
}
