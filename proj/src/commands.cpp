#include "sai/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "sai/parser.hpp"
#include "sai/smtlib.hpp"

namespace sai {
namespace {

using nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Problem load(const CommandOptions& opts) {
  if (opts.problem_path.empty()) throw UsageError("no problem file given");
  try {
    return parse_problem(read_file(opts.problem_path));
  } catch (const ParseError& e) {
    throw UsageError(opts.problem_path + ":" + e.what());
  }
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
  } catch (const FixedPointNotReached& e) {
    err << "error: " << e.what() << " (raise --max-order above " << e.cap << ")\n";
    return exit_code(Status::Unknown);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::ios_base::failure& e) {
    err << "error: I/O failure: " << e.what() << "\n";
  }
  return kUsageExitCode;
}

Polynomial target_poly(const Problem& prob, const CommandOptions& opts) {
  if (!opts.poly.empty()) return parse_polynomial(opts.poly, prob.ctx);
  Formula c = simplify(prob.candidate);
  if (c.kind() != Formula::Kind::Atom) throw UsageError("the invariant is not a single atom; pass --poly");
  return c.poly();
}

std::optional<Point> params_of(const Problem& prob, const CommandOptions& opts) {
  if (!prob.parametric()) {
    if (!opts.assignments.empty()) throw UsageError("problem has no parameters to assign");
    return std::nullopt;
  }
  return parse_assignments(opts.assignments, prob.ctx->param_names());
}

std::string point_text(const Point& p, const std::vector<std::string>& order) {
  std::string s;
  for (const auto& name : order) {
    auto it = p.find(name);
    if (it == p.end()) continue;
    s += (s.empty() ? "" : ", ") + name + " = " + to_string(it->second);
  }
  return s;
}

ordered_json point_json(const Point& p) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : p) j[k] = to_string(v);
  return j;
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json j;
  j["status"] = std::string(status_name(v.status));
  j["reason"] = v.reason;
  j["witness"] = v.witness ? point_json(*v.witness) : ordered_json(nullptr);
  j["inexact"] = v.inexact;
  return j;
}

ordered_json base_report(const std::string& command, const Problem& prob, const CommandOptions& opts) {
  ordered_json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  j["problem"] = {{"source", opts.problem_path}, {"text", print_problem(prob)}};
  j["params"] = ordered_json::object();
  j["solver"] = {{"command", opts.solver.command},
                 {"timeout_s", opts.solver.timeout_s},
                 {"logic", opts.solver.logic},
                 {"max_order", opts.solver.max_order},
                 {"workers", opts.solver.workers}};
  return j;
}

ordered_json ranks_json(const std::vector<std::pair<Polynomial, unsigned>>& ranks) {
  ordered_json arr = ordered_json::array();
  for (const auto& [p, n] : ranks) arr.push_back({{"polynomial", p.to_string()}, {"N", n}});
  return arr;
}

void print_chain(std::ostream& out, const std::vector<Polynomial>& chain) {
  for (std::size_t i = 0; i < chain.size(); ++i) out << "L^" << i << " = " << chain[i].to_string() << "\n";
}

void print_goals(std::ostream& out, const InvariantReport& rep, const std::vector<std::string>& vars) {
  for (const auto& g : rep.goals) {
    out << "goal " << g.goal.name << " (" << g.goal.description << "): " << status_name(g.verdict.status);
    if (!g.verdict.reason.empty()) out << " [" << g.verdict.reason << "]";
    out << "\n";
    if (g.verdict.witness)
      out << "  witness: " << point_text(*g.verdict.witness, vars) << (g.verdict.inexact ? " (inexact)" : "") << "\n";
  }
}

std::string script_for_goals(const GoalSet& set, const std::vector<std::string>& vars, const SolverConfig& cfg) {
  std::ostringstream out;
  for (std::size_t i = 0; i < set.goals.size(); ++i) {
    if (i) out << "(reset)\n";
    out << "; goal " << set.goals[i].name << ": " << set.goals[i].description << "\n";
    out << emit_validity_script(simplify(set.goals[i].formula), vars, cfg.logic);
  }
  return out.str();
}

}  // namespace

Point parse_assignments(const std::vector<std::string>& items, const std::vector<std::string>& params) {
  Point out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("parameter assignment needs name=value: " + item);
    std::string name = item.substr(0, eq);
    if (std::find(params.begin(), params.end(), name) == params.end())
      throw std::invalid_argument("'" + name + "' is not a declared parameter");
    if (!out.emplace(name, parse_rational(item.substr(eq + 1))).second)
      throw std::invalid_argument("parameter '" + name + "' assigned twice");
  }
  for (const auto& p : params)
    if (!out.count(p)) throw std::invalid_argument("missing value for parameter '" + p + "' (use -p " + p + "=...)");
  return out;
}

int cmd_lie(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Problem prob = load(opts);
    print_chain(out, lie_chain(target_poly(prob, opts), prob.field, opts.order));
    return 0;
  });
}

int cmd_rank(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Problem prob = load(opts);
    Polynomial p = target_poly(prob, opts);
    RankBound b = p.has_params() ? parametric_rank_bound(p, prob.field, opts.solver.max_order)
                                 : rank_bound(p, prob.field, opts.solver.max_order);
    print_chain(out, b.chain);
    out << "N = " << b.value << "\n";
    out << "L^" << b.value + 1 << " is in the ideal <L^0, ..., L^" << b.value << ">\n";
    return 0;
  });
}

int cmd_trans(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Problem prob = load(opts);
    Polynomial p = target_poly(prob, opts);
    RankBound b = rank_bound(p, prob.field, opts.solver.max_order);
    out << "N = " << b.value << "\n";
    out << "pi = " << to_string(trans_formula(b), Syntax::Math) << "\n";
    out << "psi+ = " << to_string(psi_plus(b), Syntax::Math) << "\n";
    out << "phi0 = " << to_string(phi_zero(b), Syntax::Math) << "\n";
    out << "phi+ = " << to_string(phi_plus(b), Syntax::Math) << "\n";
    return 0;
  });
}

int cmd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Problem prob = load(opts);
    std::optional<Point> u = params_of(prob, opts);
    Verdict dom = check_init_subset_domain(prob, opts.solver);
    if (dom.status != Status::Valid)
      err << "warning: initial set not shown to lie inside the domain (" << status_name(dom.status) << ")\n";
    InvariantReport rep = analyze_invariant(prob, u, opts.solver);
    std::vector<std::string> vars = prob.ctx->state_names();
    if (opts.json) {
      ordered_json j = base_report("check", prob, opts);
      if (u) j["params"] = point_json(*u);
      j["verdict"] = verdict_json(rep.verdict);
      j["path"] = rep.path;
      ordered_json goals = ordered_json::array();
      for (const auto& g : rep.goals) {
        ordered_json gj = verdict_json(g.verdict);
        gj["name"] = g.goal.name;
        gj["description"] = g.goal.description;
        gj["seconds"] = g.seconds;
        goals.push_back(gj);
      }
      j["goals"] = goals;
      j["rank_bounds"] = ranks_json(rep.rank_bounds);
      j["timing"] = {{"total_s", rep.seconds}};
      j["solver_calls"] = rep.solver_calls;
      j["transcripts"] = rep.transcripts;
      out << j.dump(2) << "\n";
    } else {
      out << "verdict: " << status_name(rep.verdict.status) << "\n";
      if (!rep.verdict.reason.empty()) out << "reason: " << rep.verdict.reason << "\n";
      if (rep.verdict.witness)
        out << "witness: " << point_text(*rep.verdict.witness, vars) << (rep.verdict.inexact ? " (inexact)" : "")
            << "\n";
      if (!rep.path.empty()) out << "path: " << rep.path << "\n";
      print_goals(out, rep, vars);
      for (const auto& [p, n] : rep.rank_bounds) out << "rank bound N = " << n << " for " << p.to_string() << "\n";
      out << "solver calls: " << rep.solver_calls << "\n";
      out << std::fixed << std::setprecision(3) << "time: " << rep.seconds << " s\n";
    }
    return exit_code(rep.verdict.status);
  });
}

int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Problem prob = load(opts);
    if (!prob.parametric()) throw UsageError("generate needs a template with params");
    GenerationOptions gen;
    if (opts.strategy == "grid") {
      if (opts.grid.empty()) throw UsageError("grid strategy needs --grid name=lo:hi:step,...");
      gen.strategy = Strategy::Grid;
      gen.grid = parse_grid(opts.grid);
    } else if (opts.strategy == "existential") {
      gen.strategy = Strategy::Existential;
    } else if (opts.strategy == "qe-script") {
      gen.strategy = Strategy::QeScript;
      if (!opts.emit_path.empty()) gen.qe_script_path = opts.emit_path;
      gen.qe_command = opts.qe_command;
    } else {
      throw UsageError("unknown strategy '" + opts.strategy + "' (grid, existential, qe-script)");
    }
    auto start = std::chrono::steady_clock::now();
    GenerationResult res = generate_constraint(prob, opts.solver, gen);
    std::vector<std::string> params = prob.ctx->param_names();
    std::optional<Point> sample = pick_sample(res, params, opts.solver);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* mode = res.mode == GenerationResult::Mode::WitnessList       ? "WitnessList"
                       : res.mode == GenerationResult::Mode::ConstraintFormula ? "ConstraintFormula"
                                                                                : "Unknown";
    if (opts.json) {
      ordered_json j = base_report("generate", prob, opts);
      ordered_json g;
      g["strategy"] = opts.strategy;
      g["mode"] = mode;
      g["constraint"] = res.constraint ? ordered_json(to_string(*res.constraint)) : ordered_json(nullptr);
      ordered_json ws = ordered_json::array();
      for (const auto& w : res.witnesses) ws.push_back(point_json(w));
      g["witnesses"] = ws;
      ordered_json checked = ordered_json::array();
      for (const auto& [pt, v] : res.checked) {
        ordered_json c = verdict_json(v);
        c["params"] = point_json(pt);
        checked.push_back(c);
      }
      g["checked"] = checked;
      g["sample"] = sample ? point_json(*sample) : ordered_json(nullptr);
      g["reason"] = res.reason;
      j["generation"] = g;
      j["timing"] = {{"total_s", seconds}};
      j["solver_calls"] = res.solver_calls;
      j["transcripts"] = ordered_json::array();
      out << j.dump(2) << "\n";
    } else {
      out << "mode: " << mode << "\n";
      if (!res.reason.empty()) out << "note: " << res.reason << "\n";
      if (res.constraint) out << "constraint: " << to_string(*res.constraint) << "\n";
      for (const auto& [pt, v] : res.checked)
        out << "checked " << point_text(pt, params) << ": " << status_name(v.status) << "\n";
      out << "witnesses: " << res.witnesses.size() << "\n";
      for (const auto& w : res.witnesses) out << "  " << point_text(w, params) << "\n";
      out << "sample: " << (sample ? point_text(*sample, params) : std::string("none")) << "\n";
      out << "solver calls: " << res.solver_calls << "\n";
    }
    return res.mode == GenerationResult::Mode::Unknown ? exit_code(Status::Unknown) : 0;
  });
}

int cmd_falsify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Problem prob = load(opts);
    std::optional<Point> u = params_of(prob, opts);
    Problem closed = u ? prob.instantiate(*u) : prob;
    NumericCheckResult res = numeric_ci_check(closed, closed.candidate, opts.budget);
    std::vector<std::string> vars = prob.ctx->state_names();
    auto coords = [&](const std::vector<double>& x) {
      std::ostringstream s;
      s << std::setprecision(10);
      for (std::size_t i = 0; i < x.size(); ++i) s << (i ? ", " : "") << vars[i] << " = " << x[i];
      return s.str();
    };
    switch (res.kind) {
      case NumericCheckResult::Kind::NoViolationFound:
        out << "NoViolationFound (" << res.samples << " initial points, T = " << opts.budget.horizon
            << ", h = " << opts.budget.step << ")\n";
        break;
      case NumericCheckResult::Kind::Violation:
        out << "Violation at t = " << res.time << " from "
            << (res.exact_x0 ? point_text(*res.exact_x0, vars) : coords(res.x0)) << "\n";
        break;
      case NumericCheckResult::Kind::SamplingFailed:
        out << "SamplingFailed: " << res.message << "\n";
        break;
    }
    if (!opts.csv_path.empty() && res.kind != NumericCheckResult::Kind::SamplingFailed) {
      std::vector<double> x0 = res.x0;
      if (x0.empty()) {
        Formula init = simplify(closed.init);
        if (auto pts = pinned_points(init, vars); pts && !pts->empty())
          for (const auto& v : vars) x0.push_back(pts->front().at(v).get_d());
      }
      if (!x0.empty()) {
        std::ofstream csv(opts.csv_path);
        if (!csv) throw UsageError("cannot write '" + opts.csv_path + "'");
        write_csv(integrate(closed.field, x0, opts.budget), vars, csv);
      }
    }
    switch (res.kind) {
      case NumericCheckResult::Kind::NoViolationFound: return 0;
      case NumericCheckResult::Kind::Violation: return 1;
      default: return 2;
    }
  });
}

int cmd_emit(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Problem prob = load(opts);
    std::string text;
    RankOracle oracle(prob.field, opts.solver.max_order);
    if (opts.qe) {
      if (!prob.parametric()) throw UsageError("QE scripts are for templates with params");
      text = emit_qe_script(prob, oracle);
    } else {
      std::optional<Point> u = params_of(prob, opts);
      Problem closed = u ? prob.instantiate(*u) : prob;
      text = script_for_goals(build_goals(closed, oracle), closed.ctx->state_names(), opts.solver);
    }
    if (opts.emit_path.empty() || opts.emit_path == "-") {
      out << text;
    } else {
      std::ofstream file(opts.emit_path, std::ios::binary);
      if (!file) throw UsageError("cannot write '" + opts.emit_path + "'");
      file << text;
      out << "wrote " << opts.emit_path << "\n";
    }
    return 0;
  });
}

}  // namespace sai
