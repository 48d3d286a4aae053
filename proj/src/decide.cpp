#include "sai/decide.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "sai/parser.hpp"
#include "sai/process.hpp"
#include "sai/smtlib.hpp"

namespace sai {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  std::size_t threads = std::min<std::size_t>(n, std::max(1u, workers));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

std::string pad(unsigned n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03u", n);
  return buf;
}

Point full_point(const std::vector<std::string>& vars, const Point& partial) {
  Point out;
  for (const auto& v : vars) {
    auto it = partial.find(v);
    out[v] = it == partial.end() ? Rational(0) : it->second;
  }
  return out;
}

Verdict run_query(const Formula& phi, const Formula& simplified, const std::vector<std::string>& vars,
                  const SolverConfig& cfg, QueryLog* log, std::string_view label) {
  std::string script = emit_validity_script(simplified, vars, cfg.logic);
  std::vector<std::string> argv = split_command(cfg.command);
  argv.insert(argv.end(), cfg.options.begin(), cfg.options.end());
  ProcessResult run = run_process(argv, script, cfg.timeout_s);

  std::string transcript;
  if (!cfg.transcript_dir.empty()) {
    unsigned idx = log ? log->next_index() : 0;
    std::filesystem::create_directories(cfg.transcript_dir);
    transcript = (std::filesystem::path(cfg.transcript_dir) / (pad(idx) + "-" + std::string(label))).string();
    std::ofstream(transcript + ".smt2") << script;
    std::ofstream(transcript + ".out") << run.out << run.err;
    transcript += ".smt2";
  }
  if (log) log->record(transcript);

  switch (run.status) {
    case ProcessResult::Status::LaunchFailed: return Verdict::unknown("solver launch failure: " + run.err);
    case ProcessResult::Status::TimedOut: return Verdict::unknown("timeout");
    default: break;
  }
  SolverReply reply = parse_solver_reply(run.out);
  switch (reply.answer) {
    case SolverReply::Answer::Unsat: return Verdict::valid();
    case SolverReply::Answer::Unknown: return Verdict::unknown("solver-unknown");
    case SolverReply::Answer::Error: {
      std::string why = reply.detail;
      if (!run.err.empty()) why += "; " + run.err.substr(0, 200);
      return Verdict::unknown("solver error: " + why);
    }
    case SolverReply::Answer::Sat: break;
  }
  if (reply.model.empty() && !vars.empty()) return Verdict::unknown("solver returned no model: " + reply.detail);
  Point model;
  bool exact = true;
  for (const auto& [name, value] : reply.model) {
    model[name] = value.value;
    exact = exact && value.exact;
  }
  Point witness = full_point(vars, model);
  if (!evaluate(phi, witness)) return Verdict::invalid(witness, !exact);
  if (!exact)
    return Verdict::invalid(witness, true, "witness approximates an algebraic point; exact re-check inconclusive");
  return Verdict::unknown("solver model does not falsify the goal");
}

Verdict aggregate(const std::vector<GoalResult>& goals) {
  for (const auto& g : goals)
    if (g.verdict.status == Status::Invalid) {
      Verdict v = g.verdict;
      v.reason = "goal '" + g.goal.name + "' fails" + (v.reason.empty() ? "" : ": " + v.reason);
      return v;
    }
  for (const auto& g : goals)
    if (g.verdict.status == Status::Unknown)
      return Verdict::unknown("goal '" + g.goal.name + "': " + g.verdict.reason);
  return Verdict::valid();
}

std::string point_text(const Point& p) {
  std::string s;
  for (const auto& [k, v] : p) s += (s.empty() ? "" : ", ") + k + "=" + to_string(v);
  return s;
}

bool lex_less(const Point& a, const Point& b, const std::vector<std::string>& order) {
  for (const auto& name : order) {
    const Rational& x = a.at(name);
    const Rational& y = b.at(name);
    if (x != y) return x < y;
  }
  return false;
}

}  // namespace

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Valid: return "Valid";
    case Status::Invalid: return "Invalid";
    case Status::Unknown: return "Unknown";
  }
  return "Unknown";
}

int exit_code(Status s) {
  switch (s) {
    case Status::Valid: return 0;
    case Status::Invalid: return 1;
    case Status::Unknown: return 2;
  }
  return 2;
}

void QueryLog::record(const std::string& transcript) {
  std::lock_guard lock(mutex_);
  ++calls_;
  if (!transcript.empty()) transcripts_.push_back(transcript);
}

unsigned QueryLog::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::vector<std::string> QueryLog::transcripts() const {
  std::lock_guard lock(mutex_);
  auto out = transcripts_;
  std::sort(out.begin(), out.end());
  return out;
}

unsigned QueryLog::next_index() {
  std::lock_guard lock(mutex_);
  return ++index_;
}

Verdict check_validity(const Formula& phi, const std::vector<std::string>& vars, const SolverConfig& cfg,
                       QueryLog* log, std::string_view label) {
  if (cfg.timeout_s <= 0) throw std::invalid_argument("solver timeout must be positive");
  Formula s = simplify(phi);
  if (s.is_true()) return Verdict::valid("simplifies to true");
  if (s.is_false()) return Verdict::invalid(full_point(vars, {}), false, "simplifies to false");
  if (s.kind() == Formula::Kind::Implies) {
    if (auto points = pinned_points(s.children()[0], vars)) {
      for (const auto& pt : *points)
        if (!evaluate(phi, pt)) return Verdict::invalid(pt, false, "evaluated at a finite antecedent set");
      return Verdict::valid("evaluated at a finite antecedent set");
    }
  }
  return run_query(phi, s, vars, cfg, log, label);
}

GoalSet build_goals(const Problem& prob, RankOracle& oracle) {
  Formula domain = simplify(prob.domain);
  Formula candidate = simplify(prob.candidate);
  Formula init_goal = Formula::implies(prob.init, prob.candidate);
  const std::string init_desc = "initial set inside the candidate";

  if (domain.is_true() && candidate.kind() == Formula::Kind::Atom && candidate.relation() == Relation::Eq) {
    EquationalCondition eq = equational_condition(candidate.poly(), prob.init, oracle);
    return {"equational",
            {{"init", init_desc, eq.init},
             {"closure", "Lie derivatives up to the rank bound vanish on the zero set", eq.closure}}};
  }

  DnfForm h = normalize_dnf(domain);
  DnfForm p = normalize_dnf(candidate);
  auto single_nonstrict = [](const DnfForm& d) {
    return d.disjuncts.size() == 1 && d.disjuncts[0].size() == 1 && !d.disjuncts[0][0].strict;
  };
  if (!domain.is_true() && single_nonstrict(h) && single_nonstrict(p)) {
    Formula theta = theta_simple(h.disjuncts[0][0].poly, p.disjuncts[0][0].poly, oracle);
    return {"simple",
            {{"init", init_desc, init_goal},
             {"theta", "no boundary exit from the candidate without leaving the domain", theta}}};
  }

  MainCondition mc = main_condition(prob, oracle);
  return {"main",
          {{"init", "condition 1: " + init_desc, mc.init},
           {"forward", "condition 2: entering the domain forward implies entering the candidate", mc.forward},
           {"backward", "condition 3: outside the candidate, backward entry into the domain avoids it",
            mc.backward}}};
}

InvariantReport analyze_invariant(const Problem& prob, const std::optional<Point>& params, const SolverConfig& cfg) {
  auto start = Clock::now();
  if (prob.parametric() != params.has_value())
    throw std::invalid_argument(prob.parametric() ? "parametric problem needs a value for every parameter"
                                                  : "closed problem takes no parameter values");
  Problem closed = params ? prob.instantiate(*params) : prob;
  InvariantReport report;
  RankOracle oracle(closed.field, cfg.max_order);
  GoalSet set;
  try {
    set = build_goals(closed, oracle);
  } catch (const FixedPointNotReached& e) {
    report.verdict = Verdict::unknown(std::string("fixed-point-not-reached: ") + e.what());
    report.rank_bounds = oracle.computed();
    report.seconds = seconds_since(start);
    return report;
  }
  report.path = set.path;
  report.rank_bounds = oracle.computed();
  std::vector<std::string> vars = closed.ctx->state_names();
  QueryLog log;
  report.goals.resize(set.goals.size());
  parallel_for(set.goals.size(), cfg.workers, [&](std::size_t i) {
    auto t0 = Clock::now();
    report.goals[i].goal = set.goals[i];
    report.goals[i].verdict = check_validity(set.goals[i].formula, vars, cfg, &log, set.goals[i].name);
    report.goals[i].seconds = seconds_since(t0);
  });
  report.verdict = aggregate(report.goals);
  report.solver_calls = log.calls();
  report.transcripts = log.transcripts();
  report.seconds = seconds_since(start);
  return report;
}

Verdict check_invariant(const Problem& prob, const std::optional<Point>& params, const SolverConfig& cfg) {
  return analyze_invariant(prob, params, cfg).verdict;
}

Verdict check_init_subset_domain(const Problem& prob, const SolverConfig& cfg) {
  return check_validity(Formula::implies(prob.init, prob.domain), prob.ctx->state_names(), cfg, nullptr,
                        "init-in-domain");
}

GridSpec parse_grid(std::string_view text) {
  GridSpec grid;
  std::string spec(text);
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("grid axis needs name=lo:hi:step: " + item);
    GridAxis axis{item.substr(0, eq), {}};
    std::vector<std::string> parts;
    std::stringstream rs(item.substr(eq + 1));
    std::string part;
    while (std::getline(rs, part, ':')) parts.push_back(part);
    if (parts.size() == 1) {
      axis.values.push_back(parse_rational(parts[0]));
    } else if (parts.size() == 3) {
      Rational lo = parse_rational(parts[0]);
      Rational hi = parse_rational(parts[1]);
      Rational step = parse_rational(parts[2]);
      if (step <= 0) throw std::invalid_argument("grid step must be positive: " + item);
      if (hi < lo) throw std::invalid_argument("grid upper end below lower end: " + item);
      if ((hi - lo) / step > 100000) throw std::invalid_argument("grid axis too large: " + item);
      for (Rational v = lo; v <= hi; v += step) axis.values.push_back(v);
    } else {
      throw std::invalid_argument("grid axis needs name=lo:hi:step: " + item);
    }
    for (const auto& a : grid)
      if (a.param == axis.param) throw std::invalid_argument("duplicate grid axis: " + axis.param);
    grid.push_back(std::move(axis));
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

std::string emit_qe_script(const Problem& prob, RankOracle& oracle) {
  GoalSet set = build_goals(prob, oracle);
  std::vector<Formula> parts;
  for (const auto& g : set.goals) parts.push_back(g.formula);
  Formula matrix = simplify(Formula::conj(parts));
  std::ostringstream out;
  auto join = [](const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : "") + names[i];
    return s;
  };
  out << "# eliminate the state variables; answer with a formula over the params\n";
  out << "params: " << join(prob.ctx->param_names()) << "\n";
  out << "forall " << join(prob.ctx->state_names()) << " .\n";
  out << to_string(matrix) << "\n";
  return out.str();
}

bool solver_supports_quantifiers(const SolverConfig& cfg) {
  std::string script =
      "(set-logic NRA)\n(assert (forall ((x Real)) (>= (* x x) 0)))\n(check-sat)\n";
  std::vector<std::string> argv = split_command(cfg.command);
  argv.insert(argv.end(), cfg.options.begin(), cfg.options.end());
  ProcessResult run = run_process(argv, script, std::min(cfg.timeout_s, 10.0));
  if (run.status != ProcessResult::Status::Exited) return false;
  return parse_solver_reply(run.out).answer == SolverReply::Answer::Sat;
}

GenerationResult generate_constraint(const Problem& prob, const SolverConfig& cfg, const GenerationOptions& opts) {
  if (!prob.parametric()) throw std::invalid_argument("generation needs a parametric template");
  GenerationResult result;
  std::vector<std::string> params = prob.ctx->param_names();

  if (opts.strategy == Strategy::Grid) {
    for (const auto& axis : opts.grid)
      if (std::find(params.begin(), params.end(), axis.param) == params.end())
        throw std::invalid_argument("grid axis '" + axis.param + "' is not a parameter");
    for (const auto& name : params) {
      bool covered = std::any_of(opts.grid.begin(), opts.grid.end(), [&](const GridAxis& a) { return a.param == name; });
      if (!covered) throw std::invalid_argument("grid does not cover parameter '" + name + "'");
    }
    std::vector<const GridAxis*> axes;
    for (const auto& name : params)
      for (const auto& a : opts.grid)
        if (a.param == name) axes.push_back(&a);
    std::vector<std::size_t> idx(axes.size(), 0);
    bool any_unknown = false;
    bool empty_axis = std::any_of(axes.begin(), axes.end(), [](const GridAxis* a) { return a->values.empty(); });
    while (!empty_axis) {
      Point u;
      for (std::size_t k = 0; k < axes.size(); ++k) u[axes[k]->param] = axes[k]->values[idx[k]];
      InvariantReport rep = analyze_invariant(prob, u, cfg);
      result.solver_calls += rep.solver_calls;
      if (rep.verdict.status == Status::Valid) result.witnesses.push_back(u);
      if (rep.verdict.status == Status::Unknown) any_unknown = true;
      result.checked.emplace_back(u, rep.verdict);
      bool done = true;
      for (std::size_t k = axes.size(); k-- > 0;) {
        if (++idx[k] < axes[k]->values.size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
    result.mode = GenerationResult::Mode::WitnessList;
    if (any_unknown) result.reason = "some grid points were undecided";
    return result;
  }

  RankOracle oracle(prob.field, cfg.max_order);
  if (opts.strategy == Strategy::QeScript) {
    std::string script;
    try {
      script = emit_qe_script(prob, oracle);
    } catch (const FixedPointNotReached& e) {
      result.reason = std::string("fixed-point-not-reached: ") + e.what();
      return result;
    }
    std::ofstream(opts.qe_script_path) << script;
    if (opts.qe_command.empty()) {
      result.reason = "QE script written to " + opts.qe_script_path + "; no QE command configured";
      return result;
    }
    std::vector<std::string> argv = split_command(opts.qe_command);
    argv.push_back(opts.qe_script_path);
    ProcessResult run = run_process(argv, "", cfg.timeout_s);
    if (run.status != ProcessResult::Status::Exited || run.exit_code != 0) {
      result.reason = "QE command failed: " + run.err;
      return result;
    }
    std::string text;
    std::stringstream lines(run.out);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("params:", 0) == 0) continue;
      text += line + "\n";
    }
    try {
      Formula r = parse_formula(text, prob.ctx);
      result.constraint = r;
      result.mode = GenerationResult::Mode::ConstraintFormula;
    } catch (const std::exception& e) {
      result.reason = std::string("cannot parse QE output: ") + e.what();
    }
    return result;
  }

  // Existential.
  if (!solver_supports_quantifiers(cfg)) {
    result.reason = "backend does not support quantified real arithmetic";
    return result;
  }
  GoalSet set;
  try {
    set = build_goals(prob, oracle);
  } catch (const FixedPointNotReached& e) {
    result.reason = std::string("fixed-point-not-reached: ") + e.what();
    return result;
  }
  std::vector<Formula> parts;
  for (const auto& g : set.goals) parts.push_back(g.formula);
  Formula matrix = simplify(Formula::conj(parts));
  std::string script = emit_exists_forall_script(matrix, params, prob.ctx->state_names());
  std::vector<std::string> argv = split_command(cfg.command);
  argv.insert(argv.end(), cfg.options.begin(), cfg.options.end());
  ProcessResult run = run_process(argv, script, cfg.timeout_s);
  result.solver_calls = 1;
  if (run.status == ProcessResult::Status::TimedOut) {
    result.reason = "timeout";
    return result;
  }
  SolverReply reply = parse_solver_reply(run.out);
  if (reply.answer == SolverReply::Answer::Unsat) {
    result.mode = GenerationResult::Mode::WitnessList;
    result.reason = "no parameter values satisfy the condition";
    return result;
  }
  if (reply.answer != SolverReply::Answer::Sat) {
    result.reason = reply.answer == SolverReply::Answer::Unknown ? "solver-unknown" : "solver error: " + reply.detail;
    return result;
  }
  Point u;
  for (const auto& [name, value] : reply.model) {
    if (!value.exact) {
      result.reason = "parameter model is irrational";
      return result;
    }
    u[name] = value.value;
  }
  u = full_point(params, u);
  InvariantReport rep = analyze_invariant(prob, u, cfg);
  result.solver_calls += rep.solver_calls;
  result.checked.emplace_back(u, rep.verdict);
  if (rep.verdict.status == Status::Valid) {
    result.mode = GenerationResult::Mode::WitnessList;
    result.witnesses.push_back(u);
  } else {
    result.reason = "solver witness " + point_text(u) + " did not re-verify: " + rep.verdict.reason;
  }
  return result;
}

std::optional<Point> pick_sample(const GenerationResult& result, const std::vector<std::string>& params,
                                 const SolverConfig& cfg, TieBreak tie_break) {
  if (result.mode == GenerationResult::Mode::WitnessList) {
    if (result.witnesses.empty()) return std::nullopt;
    auto cmp = [&](const Point& a, const Point& b) { return lex_less(a, b, params); };
    return tie_break == TieBreak::LexSmallest
               ? *std::min_element(result.witnesses.begin(), result.witnesses.end(), cmp)
               : *std::max_element(result.witnesses.begin(), result.witnesses.end(), cmp);
  }
  if (result.mode != GenerationResult::Mode::ConstraintFormula || !result.constraint) return std::nullopt;
  Formula r = simplify(*result.constraint);
  if (r.is_false()) return std::nullopt;
  if (r.is_true()) return full_point(params, {});
  std::string script = emit_satisfiability_script(r, params, cfg.logic);
  std::vector<std::string> argv = split_command(cfg.command);
  argv.insert(argv.end(), cfg.options.begin(), cfg.options.end());
  ProcessResult run = run_process(argv, script, cfg.timeout_s);
  if (run.status != ProcessResult::Status::Exited) return std::nullopt;
  SolverReply reply = parse_solver_reply(run.out);
  if (reply.answer != SolverReply::Answer::Sat) return std::nullopt;
  Point u;
  for (const auto& [name, value] : reply.model) u[name] = value.value;
  u = full_point(params, u);
  if (!evaluate(r, u)) return std::nullopt;
  return u;
}

}  // namespace sai
