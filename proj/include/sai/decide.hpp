#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sai/encoding.hpp"

namespace sai {

enum class Status { Valid, Invalid, Unknown };

std::string_view status_name(Status s);
/// Process exit code for a verdict: 0 Valid, 1 Invalid, 2 Unknown.
int exit_code(Status s);
inline constexpr int kUsageExitCode = 3;

struct Verdict {
  Status status = Status::Unknown;
  /// For Invalid: a point falsifying the checked formula.
  std::optional<Point> witness;
  /// The witness approximates an algebraic (irrational) model value.
  bool inexact = false;
  std::string reason;

  static Verdict valid(std::string reason = {}) { return {Status::Valid, std::nullopt, false, std::move(reason)}; }
  static Verdict invalid(Point w, bool inexact = false, std::string reason = {}) {
    return {Status::Invalid, std::move(w), inexact, std::move(reason)};
  }
  static Verdict unknown(std::string reason) { return {Status::Unknown, std::nullopt, false, std::move(reason)}; }
};

struct SolverConfig {
  std::string command = "z3 -in -smt2";
  double timeout_s = 60;
  std::string logic = "QF_NRA";
  /// Extra arguments appended to the command.
  std::vector<std::string> options;
  unsigned workers = 4;
  unsigned max_order = kDefaultRankCap;
  /// When non-empty, every query script and solver reply is saved here.
  std::string transcript_dir;
};

/// Counts solver invocations and collects transcript paths. Thread-safe.
class QueryLog {
 public:
  void record(const std::string& transcript);
  unsigned calls() const;
  std::vector<std::string> transcripts() const;
  /// Unique index for naming transcript files.
  unsigned next_index();

 private:
  mutable std::mutex mutex_;
  unsigned calls_ = 0;
  unsigned index_ = 0;
  std::vector<std::string> transcripts_;
};

/// Decides "for all vars . phi". Short-circuits without the solver when phi
/// simplifies to a constant or when its antecedent pins every variable to
/// finitely many rational points. Invalid verdicts carry a witness that has
/// been re-evaluated against phi.
Verdict check_validity(const Formula& phi, const std::vector<std::string>& vars, const SolverConfig& cfg,
                       QueryLog* log = nullptr, std::string_view label = "query");

/// One universally quantified condition of an invariance check.
struct Goal {
  std::string name;
  std::string description;
  Formula formula = Formula::truth();
};

struct GoalSet {
  std::string path;  // "main", "simple" or "equational"
  std::vector<Goal> goals;
};

/// Goals for a problem: the simple criterion when domain and candidate are
/// single nonstrict atoms, the equational fast path for `p = 0` over the
/// whole space, and the general three-condition criterion otherwise.
/// Template parameters, if any, stay free. Throws FixedPointNotReached.
GoalSet build_goals(const Problem& prob, RankOracle& oracle);

struct GoalResult {
  Goal goal;
  Verdict verdict;
  double seconds = 0;
};

struct InvariantReport {
  Verdict verdict;
  std::string path;
  std::vector<GoalResult> goals;
  std::vector<std::pair<Polynomial, unsigned>> rank_bounds;
  unsigned solver_calls = 0;
  std::vector<std::string> transcripts;
  double seconds = 0;
};

/// Full check with per-goal verdicts. `params` must be given exactly when the
/// problem is parametric (std::invalid_argument otherwise).
InvariantReport analyze_invariant(const Problem& prob, const std::optional<Point>& params, const SolverConfig& cfg);
Verdict check_invariant(const Problem& prob, const std::optional<Point>& params, const SolverConfig& cfg);

/// for all x . init -> domain. A failure only warrants a warning.
Verdict check_init_subset_domain(const Problem& prob, const SolverConfig& cfg);

struct GridAxis {
  std::string param;
  std::vector<Rational> values;
};
using GridSpec = std::vector<GridAxis>;

/// "a=-2:2:1,b=-1:1:1" (lo:hi:step) or "a=3" for a single value.
GridSpec parse_grid(std::string_view text);

enum class Strategy { Grid, Existential, QeScript };

struct GenerationOptions {
  Strategy strategy = Strategy::Grid;
  GridSpec grid;
  /// QeScript: where to write the script, and an optional command run as
  /// `<qe_command> <script path>` whose stdout is a constraint over params.
  std::string qe_script_path = "qe-query.txt";
  std::string qe_command;
};

struct GenerationResult {
  enum class Mode { ConstraintFormula, WitnessList, Unknown };
  Mode mode = Mode::Unknown;
  std::optional<Formula> constraint;
  std::vector<Point> witnesses;
  /// Every grid point tried, with its verdict.
  std::vector<std::pair<Point, Verdict>> checked;
  std::string reason;
  unsigned solver_calls = 0;
};

GenerationResult generate_constraint(const Problem& prob, const SolverConfig& cfg, const GenerationOptions& opts);

/// Plain-text quantified formula for an external QE tool.
std::string emit_qe_script(const Problem& prob, RankOracle& oracle);

/// Probes the backend with a quantified query.
bool solver_supports_quantifiers(const SolverConfig& cfg);

enum class TieBreak { LexSmallest, LexLargest };

/// Witness list: lexicographic extreme in parameter order. Constraint: one
/// satisfiability query. Absent when nothing qualifies.
std::optional<Point> pick_sample(const GenerationResult& result, const std::vector<std::string>& params,
                                 const SolverConfig& cfg, TieBreak tie_break = TieBreak::LexSmallest);

}  // namespace sai
