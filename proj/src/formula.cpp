#include "sai/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace sai {

struct Formula::Node {
  Kind kind;
  std::optional<Polynomial> poly;
  Relation rel = Relation::Ge;
  std::vector<Formula> children;
};

std::string_view relation_symbol(Relation r) {
  switch (r) {
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
    case Relation::Le: return "<=";
    case Relation::Lt: return "<";
    case Relation::Eq: return "=";
    case Relation::Ne: return "!=";
  }
  return "?";
}

namespace {

std::string_view math_symbol(Relation r) {
  switch (r) {
    case Relation::Ge: return "≥";
    case Relation::Gt: return ">";
    case Relation::Le: return "≤";
    case Relation::Lt: return "<";
    case Relation::Eq: return "=";
    case Relation::Ne: return "≠";
  }
  return "?";
}

}  // namespace

bool holds(Relation r, int sign) {
  switch (r) {
    case Relation::Ge: return sign >= 0;
    case Relation::Gt: return sign > 0;
    case Relation::Le: return sign <= 0;
    case Relation::Lt: return sign < 0;
    case Relation::Eq: return sign == 0;
    case Relation::Ne: return sign != 0;
  }
  return false;
}

Formula Formula::truth() {
  static const Formula t(std::make_shared<const Node>(Node{Kind::True, std::nullopt, Relation::Ge, {}}));
  return t;
}

Formula Formula::falsity() {
  static const Formula f(std::make_shared<const Node>(Node{Kind::False, std::nullopt, Relation::Ge, {}}));
  return f;
}

Formula Formula::atom(Polynomial p, Relation r) {
  return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(p), r, {}}));
}

Formula Formula::conj(std::vector<Formula> parts) {
  return Formula(std::make_shared<const Node>(Node{Kind::And, std::nullopt, Relation::Ge, std::move(parts)}));
}

Formula Formula::disj(std::vector<Formula> parts) {
  return Formula(std::make_shared<const Node>(Node{Kind::Or, std::nullopt, Relation::Ge, std::move(parts)}));
}

Formula Formula::negate(Formula f) {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, std::nullopt, Relation::Ge, {std::move(f)}}));
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Implies, std::nullopt, Relation::Ge, {std::move(lhs), std::move(rhs)}}));
}

Formula::Kind Formula::kind() const { return node_->kind; }

const Polynomial& Formula::poly() const {
  if (node_->kind != Kind::Atom) throw std::logic_error("poly() on a non-atom formula");
  return *node_->poly;
}

Relation Formula::relation() const {
  if (node_->kind != Kind::Atom) throw std::logic_error("relation() on a non-atom formula");
  return node_->rel;
}

const std::vector<Formula>& Formula::children() const { return node_->children; }

Formula Formula::instantiate(const Point& params) const {
  switch (kind()) {
    case Kind::True:
    case Kind::False: return *this;
    case Kind::Atom: return atom(sai::instantiate(poly(), params), relation());
    default: break;
  }
  std::vector<Formula> kids;
  kids.reserve(children().size());
  for (const auto& c : children()) kids.push_back(c.instantiate(params));
  return Formula(std::make_shared<const Node>(Node{kind(), std::nullopt, Relation::Ge, std::move(kids)}));
}

bool Formula::has_params() const {
  if (kind() == Kind::Atom) return poly().has_params();
  return std::any_of(children().begin(), children().end(), [](const Formula& c) { return c.has_params(); });
}

std::vector<Polynomial> Formula::atom_polys() const {
  std::vector<Polynomial> out;
  auto visit = [&](auto&& self, const Formula& f) -> void {
    if (f.kind() == Kind::Atom) {
      if (std::find(out.begin(), out.end(), f.poly()) == out.end()) out.push_back(f.poly());
      return;
    }
    for (const auto& c : f.children()) self(self, c);
  };
  visit(visit, *this);
  return out;
}

std::size_t Formula::size() const {
  std::size_t n = 1;
  for (const auto& c : children()) n += c.size();
  return n;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.kind() == Formula::Kind::Atom) return a.relation() == b.relation() && a.poly() == b.poly();
  return a.children() == b.children();
}

namespace {

void append_unique(std::vector<Formula>& out, const Formula& f) {
  if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
}

}  // namespace

Formula simplify(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True:
    case K::False: return f;
    case K::Atom: {
      if (auto c = f.poly().constant_value())
        return holds(f.relation(), sign(*c)) ? Formula::truth() : Formula::falsity();
      return f;
    }
    case K::Not: {
      Formula inner = simplify(f.children()[0]);
      if (inner.is_true()) return Formula::falsity();
      if (inner.is_false()) return Formula::truth();
      if (inner.kind() == K::Not) return inner.children()[0];
      return Formula::negate(inner);
    }
    case K::And:
    case K::Or: {
      bool is_and = f.kind() == K::And;
      std::vector<Formula> parts;
      for (const auto& c : f.children()) {
        Formula s = simplify(c);
        if (s.is_true()) {
          if (is_and) continue;
          return Formula::truth();
        }
        if (s.is_false()) {
          if (!is_and) continue;
          return Formula::falsity();
        }
        if (s.kind() == f.kind()) {
          for (const auto& g : s.children()) append_unique(parts, g);
        } else {
          append_unique(parts, s);
        }
      }
      if (parts.empty()) return is_and ? Formula::truth() : Formula::falsity();
      if (parts.size() == 1) return parts.front();
      return is_and ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case K::Implies: {
      Formula lhs = simplify(f.children()[0]);
      Formula rhs = simplify(f.children()[1]);
      if (lhs.is_false() || rhs.is_true()) return Formula::truth();
      if (lhs.is_true()) return rhs;
      if (rhs.is_false()) return simplify(Formula::negate(lhs));
      if (lhs == rhs) return Formula::truth();
      return Formula::implies(lhs, rhs);
    }
  }
  return f;
}

bool evaluate(const Formula& f, std::span<const Rational> point) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: return holds(f.relation(), sign(f.poly().evaluate(point)));
    case K::Not: return !evaluate(f.children()[0], point);
    case K::And:
      return std::all_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate(c, point); });
    case K::Or:
      return std::any_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate(c, point); });
    case K::Implies: return !evaluate(f.children()[0], point) || evaluate(f.children()[1], point);
  }
  return false;
}

bool evaluate(const Formula& f, const Point& point) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::True: return true;
    case K::False: return false;
    case K::Atom: return holds(f.relation(), sign(sai::evaluate(f.poly(), point)));
    case K::Not: return !evaluate(f.children()[0], point);
    case K::And:
      return std::all_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate(c, point); });
    case K::Or:
      return std::any_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate(c, point); });
    case K::Implies: return !evaluate(f.children()[0], point) || evaluate(f.children()[1], point);
  }
  return false;
}

namespace {

int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    default: return 4;
  }
}

void print(const Formula& f, Syntax syntax, std::string& out) {
  using K = Formula::Kind;
  bool math = syntax == Syntax::Math;
  auto child = [&](const Formula& c, bool wrap) {
    if (wrap) out += "(";
    print(c, syntax, out);
    if (wrap) out += ")";
  };
  switch (f.kind()) {
    case K::True: out += "true"; return;
    case K::False: out += "false"; return;
    case K::Atom:
      out += f.poly().to_string();
      out += " ";
      out += math ? math_symbol(f.relation()) : relation_symbol(f.relation());
      out += " 0";
      return;
    case K::Not: {
      out += math ? "¬" : "!";
      const Formula& c = f.children()[0];
      child(c, c.kind() != K::True && c.kind() != K::False && c.kind() != K::Not);
      return;
    }
    case K::And:
    case K::Or: {
      if (f.children().empty()) {
        out += f.kind() == K::And ? "true" : "false";
        return;
      }
      std::string_view sep = f.kind() == K::And ? (math ? " ∧ " : " & ") : (math ? " ∨ " : " | ");
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += sep;
        first = false;
        child(c, precedence(c.kind()) <= precedence(f.kind()));
      }
      return;
    }
    case K::Implies: {
      const Formula& lhs = f.children()[0];
      const Formula& rhs = f.children()[1];
      child(lhs, precedence(lhs.kind()) <= precedence(K::Implies));
      out += math ? " → " : " -> ";
      child(rhs, precedence(rhs.kind()) < precedence(K::Implies));
      return;
    }
  }
}

/// NNF + distribution. `negated` tracks an odd number of enclosing negations.
DnfForm to_dnf(const Formula& f, bool negated) {
  using K = Formula::Kind;
  auto single = [](Polynomial p, bool strict) {
    DnfForm d;
    if (auto c = p.constant_value()) {
      int s = sign(*c);
      if (strict ? s > 0 : s >= 0) d.disjuncts.push_back({});
      return d;
    }
    d.disjuncts.push_back({NormAtom{std::move(p), strict}});
    return d;
  };
  auto disjoin = [](DnfForm a, const DnfForm& b) {
    for (const auto& c : b.disjuncts)
      if (std::find(a.disjuncts.begin(), a.disjuncts.end(), c) == a.disjuncts.end())
        a.disjuncts.push_back(c);
    return a;
  };
  auto conjoin = [](const DnfForm& a, const DnfForm& b) {
    DnfForm out;
    for (const auto& ca : a.disjuncts) {
      for (const auto& cb : b.disjuncts) {
        Conjunction merged = ca;
        for (const auto& atom : cb)
          if (std::find(merged.begin(), merged.end(), atom) == merged.end()) merged.push_back(atom);
        if (std::find(out.disjuncts.begin(), out.disjuncts.end(), merged) == out.disjuncts.end())
          out.disjuncts.push_back(std::move(merged));
      }
    }
    return out;
  };
  auto truth = [] {
    DnfForm d;
    d.disjuncts.push_back({});
    return d;
  };

  switch (f.kind()) {
    case K::True: return negated ? DnfForm{} : truth();
    case K::False: return negated ? truth() : DnfForm{};
    case K::Atom: {
      const Polynomial& p = f.poly();
      Relation r = f.relation();
      if (negated) {
        switch (r) {
          case Relation::Ge: r = Relation::Lt; break;
          case Relation::Gt: r = Relation::Le; break;
          case Relation::Le: r = Relation::Gt; break;
          case Relation::Lt: r = Relation::Ge; break;
          case Relation::Eq: r = Relation::Ne; break;
          case Relation::Ne: r = Relation::Eq; break;
        }
      }
      switch (r) {
        case Relation::Ge: return single(p, false);
        case Relation::Gt: return single(p, true);
        case Relation::Le: return single(-p, false);
        case Relation::Lt: return single(-p, true);
        case Relation::Eq: return conjoin(single(p, false), single(-p, false));
        case Relation::Ne: return disjoin(single(p, true), single(-p, true));
      }
      break;
    }
    case K::Not: return to_dnf(f.children()[0], !negated);
    case K::And:
    case K::Or: {
      bool as_and = (f.kind() == K::And) != negated;
      DnfForm acc = as_and ? truth() : DnfForm{};
      for (const auto& c : f.children()) {
        DnfForm part = to_dnf(c, negated);
        acc = as_and ? conjoin(acc, part) : disjoin(std::move(acc), part);
      }
      return acc;
    }
    case K::Implies: {
      // a -> b  ==  !a | b ;  !(a -> b) == a & !b
      DnfForm lhs = to_dnf(f.children()[0], !negated);
      DnfForm rhs = to_dnf(f.children()[1], negated);
      return negated ? conjoin(lhs, rhs) : disjoin(std::move(lhs), rhs);
    }
  }
  return {};
}

}  // namespace

std::string to_string(const Formula& f, Syntax syntax) {
  std::string out;
  print(f, syntax, out);
  return out;
}

bool DnfForm::is_true() const {
  return std::any_of(disjuncts.begin(), disjuncts.end(), [](const Conjunction& c) { return c.empty(); });
}

DnfForm normalize_dnf(const Formula& f) { return to_dnf(f, false); }

Formula to_formula(const DnfForm& dnf) {
  std::vector<Formula> ors;
  for (const auto& conj : dnf.disjuncts) {
    std::vector<Formula> ands;
    for (const auto& a : conj) ands.push_back(Formula::atom(a.poly, a.strict ? Relation::Gt : Relation::Ge));
    if (ands.size() == 1)
      ors.push_back(ands.front());
    else if (ands.empty())
      ors.push_back(Formula::truth());
    else
      ors.push_back(Formula::conj(std::move(ands)));
  }
  if (ors.empty()) return Formula::falsity();
  if (ors.size() == 1) return ors.front();
  return Formula::disj(std::move(ors));
}

bool evaluate_numeric(const DnfForm& dnf, std::span<const double> point, double slack) {
  for (const auto& conj : dnf.disjuncts) {
    bool ok = true;
    for (const auto& a : conj) {
      double v = a.poly.evaluate(point);
      if (a.strict ? !(v > -slack) : !(v >= -slack)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

namespace {

/// Solves `c*x + d = 0` for the single variable of a degree-one atom.
std::optional<std::pair<VarId, Rational>> pinned_value(const Formula& atom) {
  if (atom.kind() != Formula::Kind::Atom || atom.relation() != Relation::Eq) return std::nullopt;
  const Polynomial& p = atom.poly();
  if (p.degree() != 1) return std::nullopt;
  std::optional<VarId> var;
  Rational coef, constant = 0;
  for (const auto& [m, c] : p.terms()) {
    if (m.is_one()) {
      constant = c;
      continue;
    }
    if (var) return std::nullopt;
    var = m.factors()[0].var;
    coef = c;
  }
  return std::pair{*var, Rational(-constant / coef)};
}

}  // namespace

std::optional<std::vector<Point>> pinned_points(const Formula& lhs, const std::vector<std::string>& vars) {
  auto polys = lhs.atom_polys();
  if (polys.empty()) return std::nullopt;
  const VarContext& ctx = *polys.front().context();
  std::vector<Formula> disjuncts =
      lhs.kind() == Formula::Kind::Or ? lhs.children() : std::vector<Formula>{lhs};
  std::vector<Point> points;
  for (const auto& d : disjuncts) {
    std::vector<Formula> atoms = d.kind() == Formula::Kind::And ? d.children() : std::vector<Formula>{d};
    Point pt;
    bool empty = false;
    for (const auto& a : atoms) {
      auto pin = pinned_value(a);
      if (!pin) return std::nullopt;
      const std::string& name = ctx.name(pin->first);
      auto [it, inserted] = pt.emplace(name, pin->second);
      if (!inserted && it->second != pin->second) empty = true;
    }
    for (const auto& v : vars)
      if (!pt.count(v)) return std::nullopt;
    if (!empty) points.push_back(std::move(pt));
  }
  return points;
}

}  // namespace sai
