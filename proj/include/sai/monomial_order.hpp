#pragma once

#include <string>
#include <vector>

#include "sai/polynomial.hpp"

namespace sai {

/// Admissible monomial order. `precedence` lists variable ids from most to
/// least significant; an empty list means declaration order.
class MonomialOrder {
 public:
  enum class Kind { GradedReverseLex, Lex, GradedLex };

  explicit MonomialOrder(Kind kind = Kind::GradedReverseLex, std::vector<VarId> precedence = {});

  static MonomialOrder grevlex() { return MonomialOrder(Kind::GradedReverseLex); }
  static MonomialOrder lex() { return MonomialOrder(Kind::Lex); }
  static MonomialOrder parse(const std::string& name);

  Kind kind() const { return kind_; }
  std::string name() const;

  /// Negative if a < b, zero if equal, positive if a > b.
  int compare(const Monomial& a, const Monomial& b) const;
  bool less(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }

  /// Leading monomial of a nonzero polynomial.
  const Monomial& leading(const Polynomial& p) const;

 private:
  std::size_t rank(VarId v) const { return v < rank_.size() ? rank_[v] : offset_ + v; }

  Kind kind_;
  std::vector<std::size_t> rank_;  // var id -> precedence position
  std::size_t offset_ = 0;
};

}  // namespace sai
