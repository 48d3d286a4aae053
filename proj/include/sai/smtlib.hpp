#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sai/formula.hpp"

namespace sai {

/// SMT-LIB symbol for a variable name, quoted with |..| when needed.
std::string smt_symbol(std::string_view name);
std::string to_smtlib(const Polynomial& p);
std::string to_smtlib(const Formula& f);

/// Script asserting the negation of `phi` over the named real constants.
/// Throws std::invalid_argument if `phi` mentions an undeclared variable.
std::string emit_validity_script(const Formula& phi, const std::vector<std::string>& vars,
                                 std::string_view logic = "QF_NRA");
/// Script asserting `phi` itself; used for sampling constraints.
std::string emit_satisfiability_script(const Formula& phi, const std::vector<std::string>& vars,
                                       std::string_view logic = "QF_NRA");
/// exists params . forall state . phi, asking for the parameter values.
std::string emit_exists_forall_script(const Formula& phi, const std::vector<std::string>& params,
                                      const std::vector<std::string>& state,
                                      std::string_view logic = "NRA");

struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> items;
  bool is_list = false;
};

struct SExprError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every top-level s-expression in `text`. Bare words are atoms.
std::vector<SExpr> parse_sexprs(std::string_view text);

/// A model value: exact when rational, otherwise a rational approximation of
/// an algebraic number (`root-obj`).
struct ModelValue {
  Rational value;
  bool exact = true;
};

/// Parses numerals, decimals, (- v), (/ a b) and (root-obj poly k).
ModelValue parse_model_value(const SExpr& e);

/// Parsed solver reply to check-sat plus get-value.
struct SolverReply {
  enum class Answer { Sat, Unsat, Unknown, Error };
  Answer answer = Answer::Error;
  std::vector<std::pair<std::string, ModelValue>> model;
  std::string detail;  // reason-unknown or error text
};

SolverReply parse_solver_reply(std::string_view output);

/// k-th (1-based, ascending) real root of a univariate polynomial given by
/// ascending coefficients, isolated with a Sturm sequence and bisected to
/// width below 2^-bits.
std::optional<Rational> approximate_real_root(std::vector<Rational> coeffs, unsigned k,
                                              unsigned bits = 96);

}  // namespace sai
