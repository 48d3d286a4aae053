#include "sai/encoding.hpp"

namespace sai {
namespace {

Formula eq0(const Polynomial& p) { return Formula::atom(p, Relation::Eq); }

Formula and_of(std::vector<Formula> parts) {
  if (parts.size() == 1) return parts.front();
  return Formula::conj(std::move(parts));
}

Formula or_of(std::vector<Formula> parts) {
  if (parts.size() == 1) return parts.front();
  return Formula::disj(std::move(parts));
}

/// OR_{i=0..N} [ AND_{j<i} L^j = 0  &  sign_i * L^i rel 0 ].
template <typename LastAtom>
Formula rank_disjunction(const RankBound& bound, LastAtom last) {
  std::vector<Formula> disjuncts;
  for (unsigned i = 0; i <= bound.value; ++i) {
    std::vector<Formula> parts;
    for (unsigned j = 0; j < i; ++j) parts.push_back(eq0(bound.chain[j]));
    parts.push_back(last(i, bound.chain[i]));
    disjuncts.push_back(and_of(std::move(parts)));
  }
  return or_of(std::move(disjuncts));
}

Formula assemble(const DnfForm& set, RankOracle& oracle, bool inverse) {
  std::vector<Formula> disjuncts;
  for (const auto& conj : set.disjuncts) {
    std::vector<Formula> parts;
    for (const auto& atom : conj) {
      auto bound = oracle.bound(atom.poly);
      if (inverse)
        parts.push_back(atom.strict ? phi_plus(*bound) : phi_zero_plus(*bound));
      else
        parts.push_back(atom.strict ? psi_plus(*bound) : psi_zero_plus(*bound));
    }
    disjuncts.push_back(parts.empty() ? Formula::truth() : and_of(std::move(parts)));
  }
  if (disjuncts.empty()) return Formula::falsity();
  return or_of(std::move(disjuncts));
}

}  // namespace

Problem Problem::instantiate(const Point& params) const {
  Problem out = *this;
  out.candidate = candidate.instantiate(params);
  return out;
}

Formula trans_formula(const RankBound& bound) {
  return rank_disjunction(bound, [](unsigned, const Polynomial& l) { return Formula::atom(l, Relation::Lt); });
}

Formula psi_plus(const RankBound& bound) {
  return rank_disjunction(bound, [](unsigned, const Polynomial& l) { return Formula::atom(l, Relation::Gt); });
}

Formula phi_zero(const RankBound& bound) {
  std::vector<Formula> parts;
  for (unsigned i = 0; i <= bound.value; ++i) parts.push_back(eq0(bound.chain[i]));
  return and_of(std::move(parts));
}

Formula phi_plus(const RankBound& bound) {
  return rank_disjunction(bound, [](unsigned i, const Polynomial& l) {
    return Formula::atom(i % 2 == 0 ? l : -l, Relation::Gt);
  });
}

Formula psi_zero_plus(const RankBound& bound) {
  return Formula::disj({psi_plus(bound), phi_zero(bound)});
}

Formula phi_zero_plus(const RankBound& bound) {
  return Formula::disj({phi_plus(bound), phi_zero(bound)});
}

Formula in_formula(const DnfForm& set, RankOracle& oracle) { return assemble(set, oracle, false); }

Formula ivin_formula(const DnfForm& set, RankOracle& oracle) { return assemble(set, oracle, true); }

Formula theta_simple(const Polynomial& h, const Polynomial& p, RankOracle& oracle) {
  Formula exit_p = trans_formula(*oracle.bound(p));
  Formula exit_h = trans_formula(*oracle.bound(h));
  return Formula::implies(Formula::conj({eq0(p), exit_p}), exit_h);
}

MainCondition main_condition(const Problem& prob, RankOracle& oracle) {
  DnfForm h_set = normalize_dnf(prob.domain);
  DnfForm p_set = normalize_dnf(prob.candidate);
  Formula in_h = in_formula(h_set, oracle);
  Formula in_p = in_formula(p_set, oracle);
  Formula ivin_h = ivin_formula(h_set, oracle);
  Formula ivin_p = ivin_formula(p_set, oracle);
  MainCondition out{
      Formula::implies(prob.init, prob.candidate),
      Formula::implies(Formula::conj({prob.candidate, prob.domain, in_h}), in_p),
      Formula::implies(Formula::conj({Formula::negate(prob.candidate), prob.domain, ivin_h}),
                       Formula::negate(ivin_p)),
  };
  return out;
}

EquationalCondition equational_condition(const Polynomial& p, const Formula& init,
                                         RankOracle& oracle) {
  auto bound = oracle.bound(p);
  std::vector<Formula> derivs;
  for (unsigned i = 1; i <= bound->value; ++i) derivs.push_back(eq0(bound->chain[i]));
  Formula rhs = derivs.empty() ? Formula::truth() : and_of(std::move(derivs));
  return {Formula::implies(init, eq0(p)), Formula::implies(eq0(p), rhs), bound->value};
}

}  // namespace sai
