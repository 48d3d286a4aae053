#pragma once

#include <string>
#include <vector>

#include "sai/formula.hpp"
#include "sai/groebner.hpp"

namespace sai {

/// Polynomial dynamical system with semi-algebraic domain and initial set,
/// plus a candidate invariant (closed, or a template over `params`).
struct Problem {
  ContextPtr ctx;
  VectorField field;
  Formula domain = Formula::truth();  // omitted domain = whole space
  Formula init = Formula::truth();
  Formula candidate = Formula::truth();

  std::vector<std::string> params() const { return ctx->param_names(); }
  bool parametric() const { return ctx->num_params() > 0; }
  /// Candidate with every parameter substituted; domain/init/field are
  /// parameter-free already.
  Problem instantiate(const Point& params) const;
};

// Lie-chain formula families. Each takes the rank bound of its polynomial,
// whose chain supplies L^0 .. L^N.

/// Points whose first nonzero Lie derivative is negative: exit from p >= 0.
Formula trans_formula(const RankBound& bound);
/// First nonzero Lie derivative positive: In(p > 0).
Formula psi_plus(const RankBound& bound);
/// All derivatives up to N vanish: pointwise rank is infinite.
Formula phi_zero(const RankBound& bound);
/// Inverse-time analogue of psi_plus with alternating signs: IvIn(p > 0).
Formula phi_plus(const RankBound& bound);
/// psi_plus | phi_zero: In(p >= 0).
Formula psi_zero_plus(const RankBound& bound);
/// phi_plus | phi_zero: IvIn(p >= 0).
Formula phi_zero_plus(const RankBound& bound);

/// In_f(S) assembled atom-by-atom over a normalized set.
Formula in_formula(const DnfForm& set, RankOracle& oracle);
/// IvIn_f(S) assembled atom-by-atom over a normalized set.
Formula ivin_formula(const DnfForm& set, RankOracle& oracle);

/// (p = 0 & pi(p)) -> pi(h), for domain h >= 0 and candidate p >= 0.
Formula theta_simple(const Polynomial& h, const Polynomial& p, RankOracle& oracle);

/// The three conjuncts of the invariance criterion, each universally
/// quantified over the state variables by the caller.
struct MainCondition {
  Formula init;      // Init -> P
  Formula forward;   // P & H & In(H) -> In(P)
  Formula backward;  // !P & H & IvIn(H) -> !IvIn(P)

  Formula combined() const { return Formula::conj({init, forward, backward}); }
};

MainCondition main_condition(const Problem& prob, RankOracle& oracle);

/// Fast path for candidates `p = 0` over the whole space.
struct EquationalCondition {
  Formula init;     // Init -> p = 0
  Formula closure;  // p = 0 -> L^1 p = 0 & ... & L^N p = 0
  std::size_t order = 0;

  Formula combined() const { return Formula::conj({init, closure}); }
};

EquationalCondition equational_condition(const Polynomial& p, const Formula& init,
                                         RankOracle& oracle);

}  // namespace sai
