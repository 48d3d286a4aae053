#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sai/polynomial.hpp"

namespace sai {

/// Relation of an atom `p rel 0`.
enum class Relation { Ge, Gt, Le, Lt, Eq, Ne };

std::string_view relation_symbol(Relation r);
bool holds(Relation r, int sign);

/// Quantifier-free polynomial formula. Immutable; copies share structure.
class Formula {
 public:
  enum class Kind { True, False, Atom, And, Or, Not, Implies };

  static Formula truth();
  static Formula falsity();
  static Formula atom(Polynomial p, Relation r);
  static Formula conj(std::vector<Formula> parts);
  static Formula disj(std::vector<Formula> parts);
  static Formula negate(Formula f);
  static Formula implies(Formula lhs, Formula rhs);

  Kind kind() const;
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  /// Atom accessors; only valid for Kind::Atom.
  const Polynomial& poly() const;
  Relation relation() const;
  /// And/Or children, Not's operand, or Implies' (lhs, rhs).
  const std::vector<Formula>& children() const;

  /// Substitute values for template parameters in every atom.
  Formula instantiate(const Point& params) const;
  bool has_params() const;
  /// Distinct atom polynomials in first-occurrence order.
  std::vector<Polynomial> atom_polys() const;
  std::size_t size() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Constant-folds atoms over constant polynomials, drops True/False units,
/// flattens nested And/Or and removes structurally duplicate operands.
Formula simplify(const Formula& f);

/// Exact truth value at a point indexed by VarId (must cover every variable
/// used by the formula).
bool evaluate(const Formula& f, std::span<const Rational> point);
bool evaluate(const Formula& f, const Point& point);

enum class Syntax {
  Ascii,  // re-parseable: & | ! -> >= <= !=
  Math,   // ∧ ∨ ¬ → ≥ ≤ ≠
};

std::string to_string(const Formula& f, Syntax syntax = Syntax::Ascii);

/// Normalized atom `poly > 0` (strict) or `poly >= 0`.
struct NormAtom {
  Polynomial poly;
  bool strict;
  friend bool operator==(const NormAtom&, const NormAtom&) = default;
};

using Conjunction = std::vector<NormAtom>;

/// Disjunction of conjunctions of >= / > atoms. No disjuncts is false; an
/// empty conjunction is true.
struct DnfForm {
  std::vector<Conjunction> disjuncts;

  bool is_false() const { return disjuncts.empty(); }
  bool is_true() const;
};

DnfForm normalize_dnf(const Formula& f);
Formula to_formula(const DnfForm& dnf);

/// Evaluates with slack: atoms hold when p >= -slack (p > -slack for strict).
/// Slack 0 is the exact semantics in floating point.
bool evaluate_numeric(const DnfForm& dnf, std::span<const double> point, double slack = 0.0);

/// Points of a set written as a disjunction of conjunctions of `var = c`
/// equations that fix every variable in `vars`; nothing for other shapes.
std::optional<std::vector<Point>> pinned_points(const Formula& f, const std::vector<std::string>& vars);

}  // namespace sai
