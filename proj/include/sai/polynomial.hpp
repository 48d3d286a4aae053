#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sai/rational.hpp"

namespace sai {

using VarId = std::uint32_t;

/// Ordered variable list a polynomial is interpreted over. State variables
/// come first in declaration order, template parameters after them.
class VarContext {
 public:
  VarContext(std::vector<std::string> state, std::vector<std::string> params);

  std::size_t size() const { return names_.size(); }
  std::size_t num_state() const { return num_state_; }
  std::size_t num_params() const { return names_.size() - num_state_; }
  bool is_param(VarId v) const { return v >= num_state_; }
  const std::string& name(VarId v) const { return names_.at(v); }
  const std::vector<std::string>& names() const { return names_; }
  std::vector<std::string> state_names() const;
  std::vector<std::string> param_names() const;
  std::optional<VarId> find(std::string_view name) const;

  bool same_as(const VarContext& other) const {
    return this == &other || (num_state_ == other.num_state_ && names_ == other.names_);
  }

 private:
  std::vector<std::string> names_;
  std::size_t num_state_;
};

using ContextPtr = std::shared_ptr<const VarContext>;

ContextPtr make_context(std::vector<std::string> state, std::vector<std::string> params = {});

struct ContextMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MissingAssignment : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct VarPower {
  VarId var;
  unsigned exp;
  friend auto operator<=>(const VarPower&, const VarPower&) = default;
};

/// Power product stored sparsely: factors sorted by variable, no zero exponents.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<VarPower> factors);
  static Monomial var(VarId v, unsigned exp = 1);

  const std::vector<VarPower>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  unsigned degree() const;
  unsigned exponent(VarId v) const;
  bool divides(const Monomial& other) const;
  bool uses_var_at_least(VarId first) const;

  Monomial operator*(const Monomial& other) const;
  /// Exact quotient; requires `divisor.divides(*this)`.
  Monomial operator/(const Monomial& divisor) const;

  friend Monomial lcm(const Monomial& a, const Monomial& b);
  friend bool coprime(const Monomial& a, const Monomial& b);
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<VarPower> factors_;
};

/// Named point: variable name -> exact value.
using Point = std::map<std::string, Rational>;

/// Sparse multivariate polynomial with exact rational coefficients.
/// Canonical: no zero coefficients are stored, so equality is structural.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational>;

  explicit Polynomial(ContextPtr ctx);
  Polynomial(ContextPtr ctx, TermMap terms);

  static Polynomial constant(ContextPtr ctx, const Rational& c);
  static Polynomial variable(ContextPtr ctx, VarId v);
  static Polynomial variable(ContextPtr ctx, std::string_view name);
  static Polynomial term(ContextPtr ctx, const Monomial& m, const Rational& c);

  const ContextPtr& context() const { return ctx_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Value of a constant polynomial (0 for the zero polynomial).
  std::optional<Rational> constant_value() const;
  int degree() const;  // -1 for zero
  bool has_params() const;
  bool has_state_vars() const;
  Rational coefficient(const Monomial& m) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);
  Polynomial& operator*=(const Polynomial& q);
  Polynomial& operator*=(const Rational& c);
  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(Polynomial p, const Rational& c) { return p *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial p) { return p *= c; }
  Polynomial pow(unsigned e) const;
  Polynomial mul_term(const Monomial& m, const Rational& c) const;

  /// Values indexed by VarId; must cover the context.
  Rational evaluate(std::span<const Rational> values) const;
  double evaluate(std::span<const double> values) const;

  /// Substitutes constants for the given variables and re-canonicalizes.
  Polynomial substitute(const std::map<VarId, Rational>& values) const;

  /// Deterministic rendering: graded reverse lex, declaration precedence.
  std::string to_string() const;

  friend bool operator==(const Polynomial& p, const Polynomial& q);
  friend bool operator<(const Polynomial& p, const Polynomial& q) { return p.terms_ < q.terms_; }

 private:
  void check_context(const Polynomial& q) const;

  ContextPtr ctx_;
  TermMap terms_;
};

Rational evaluate(const Polynomial& p, const Point& point);

/// Component i is dx_i/dt. Components never mention template parameters.
class VectorField {
 public:
  VectorField(ContextPtr ctx, std::vector<Polynomial> components);

  const ContextPtr& context() const { return ctx_; }
  std::size_t dim() const { return components_.size(); }
  const Polynomial& operator[](std::size_t i) const { return components_[i]; }
  const std::vector<Polynomial>& components() const { return components_; }
  std::string to_string() const;

  friend bool operator==(const VectorField& a, const VectorField& b) {
    return a.components_ == b.components_;
  }
  friend bool operator<(const VectorField& a, const VectorField& b) {
    return a.components_ < b.components_;
  }

 private:
  ContextPtr ctx_;
  std::vector<Polynomial> components_;
};

/// Partial derivatives with respect to the state variables only.
std::vector<Polynomial> gradient(const Polynomial& p);

/// <grad p, f>.
Polynomial lie_derivative(const Polynomial& p, const VectorField& f);

/// [L^0 p, ..., L^k p].
std::vector<Polynomial> lie_chain(const Polynomial& p, const VectorField& f, unsigned k);

/// Memo of Lie chains keyed by (p, f). Safe for concurrent use.
class LieChainCache {
 public:
  /// Returns [L^0 p, ..., L^k p], extending the stored chain if needed.
  std::vector<Polynomial> chain(const Polynomial& p, const VectorField& f, unsigned k);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<Polynomial, VectorField>, std::vector<Polynomial>> chains_;
};

/// Pointwise rank: Finite(k) or Infinite.
class RankValue {
 public:
  static RankValue finite(unsigned k) { return RankValue(k); }
  static RankValue infinite() { return RankValue(); }
  bool is_finite() const { return k_.has_value(); }
  unsigned value() const { return k_.value(); }
  std::string to_string() const;
  friend bool operator==(const RankValue&, const RankValue&) = default;

 private:
  RankValue() = default;
  explicit RankValue(unsigned k) : k_(k) {}
  std::optional<unsigned> k_;
};

struct PointwiseRank {
  RankValue rank;
  Rational value;  // L^k p(x0); 0 when Infinite
};

/// Least k <= bound with L^k p(x0) != 0, or Infinite. `chain` must hold at
/// least bound+1 entries.
PointwiseRank pointwise_rank(std::span<const Polynomial> chain, std::span<const Rational> x0,
                             unsigned bound);
PointwiseRank pointwise_rank(const Polynomial& p, const VectorField& f, const Point& x0,
                             unsigned bound);

/// Substitutes values for every template parameter of p.
/// Throws MissingAssignment if a parameter is not assigned.
Polynomial instantiate(const Polynomial& p, const Point& params);

}  // namespace sai
