#include "sai/polynomial.hpp"

#include <algorithm>
#include <sstream>

#include "sai/monomial_order.hpp"

namespace sai {

// ---------------------------------------------------------------- VarContext

VarContext::VarContext(std::vector<std::string> state, std::vector<std::string> params)
    : num_state_(state.size()) {
  names_ = std::move(state);
  names_.insert(names_.end(), params.begin(), params.end());
  for (std::size_t i = 0; i < names_.size(); ++i)
    for (std::size_t j = i + 1; j < names_.size(); ++j)
      if (names_[i] == names_[j]) throw std::invalid_argument("duplicate variable: " + names_[i]);
}

std::vector<std::string> VarContext::state_names() const {
  return {names_.begin(), names_.begin() + static_cast<std::ptrdiff_t>(num_state_)};
}

std::vector<std::string> VarContext::param_names() const {
  return {names_.begin() + static_cast<std::ptrdiff_t>(num_state_), names_.end()};
}

std::optional<VarId> VarContext::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<VarId>(i);
  return std::nullopt;
}

ContextPtr make_context(std::vector<std::string> state, std::vector<std::string> params) {
  return std::make_shared<const VarContext>(std::move(state), std::move(params));
}

// ------------------------------------------------------------------ Monomial

Monomial::Monomial(std::vector<VarPower> factors) {
  std::sort(factors.begin(), factors.end());
  for (const auto& f : factors) {
    if (f.exp == 0) continue;
    if (!factors_.empty() && factors_.back().var == f.var)
      factors_.back().exp += f.exp;
    else
      factors_.push_back(f);
  }
}

Monomial Monomial::var(VarId v, unsigned exp) {
  Monomial m;
  if (exp > 0) m.factors_.push_back({v, exp});
  return m;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (const auto& f : factors_) d += f.exp;
  return d;
}

unsigned Monomial::exponent(VarId v) const {
  for (const auto& f : factors_)
    if (f.var == v) return f.exp;
  return 0;
}

bool Monomial::divides(const Monomial& other) const {
  std::size_t j = 0;
  for (const auto& f : factors_) {
    while (j < other.factors_.size() && other.factors_[j].var < f.var) ++j;
    if (j == other.factors_.size() || other.factors_[j].var != f.var ||
        other.factors_[j].exp < f.exp)
      return false;
  }
  return true;
}

bool Monomial::uses_var_at_least(VarId first) const {
  return !factors_.empty() && factors_.back().var >= first;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  std::size_t i = 0, j = 0;
  while (i < factors_.size() || j < other.factors_.size()) {
    if (j == other.factors_.size() ||
        (i < factors_.size() && factors_[i].var < other.factors_[j].var)) {
      out.factors_.push_back(factors_[i++]);
    } else if (i == factors_.size() || other.factors_[j].var < factors_[i].var) {
      out.factors_.push_back(other.factors_[j++]);
    } else {
      out.factors_.push_back({factors_[i].var, factors_[i].exp + other.factors_[j].exp});
      ++i;
      ++j;
    }
  }
  return out;
}

Monomial Monomial::operator/(const Monomial& divisor) const {
  if (!divisor.divides(*this)) throw std::invalid_argument("monomial does not divide");
  Monomial out;
  std::size_t j = 0;
  for (const auto& f : factors_) {
    unsigned e = f.exp;
    if (j < divisor.factors_.size() && divisor.factors_[j].var == f.var) e -= divisor.factors_[j++].exp;
    if (e > 0) out.factors_.push_back({f.var, e});
  }
  return out;
}

Monomial lcm(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0, j = 0;
  while (i < a.factors_.size() || j < b.factors_.size()) {
    if (j == b.factors_.size() || (i < a.factors_.size() && a.factors_[i].var < b.factors_[j].var)) {
      out.factors_.push_back(a.factors_[i++]);
    } else if (i == a.factors_.size() || b.factors_[j].var < a.factors_[i].var) {
      out.factors_.push_back(b.factors_[j++]);
    } else {
      out.factors_.push_back({a.factors_[i].var, std::max(a.factors_[i].exp, b.factors_[j].exp)});
      ++i;
      ++j;
    }
  }
  return out;
}

bool coprime(const Monomial& a, const Monomial& b) {
  std::size_t i = 0, j = 0;
  while (i < a.factors_.size() && j < b.factors_.size()) {
    if (a.factors_[i].var == b.factors_[j].var) return false;
    if (a.factors_[i].var < b.factors_[j].var)
      ++i;
    else
      ++j;
  }
  return true;
}

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(ContextPtr ctx) : ctx_(std::move(ctx)) {
  if (!ctx_) throw std::invalid_argument("polynomial requires a variable context");
}

Polynomial::Polynomial(ContextPtr ctx, TermMap terms) : Polynomial(std::move(ctx)) {
  for (auto it = terms.begin(); it != terms.end();) {
    if (it->second == 0)
      it = terms.erase(it);
    else
      ++it;
  }
  for (const auto& [m, c] : terms)
    if (!m.is_one() && m.factors().back().var >= ctx_->size())
      throw std::invalid_argument("monomial variable outside context");
  terms_ = std::move(terms);
}

Polynomial Polynomial::constant(ContextPtr ctx, const Rational& c) {
  Polynomial p(std::move(ctx));
  if (c != 0) p.terms_.emplace(Monomial(), c);
  return p;
}

Polynomial Polynomial::variable(ContextPtr ctx, VarId v) {
  if (v >= ctx->size()) throw std::out_of_range("variable id outside context");
  Polynomial p(std::move(ctx));
  p.terms_.emplace(Monomial::var(v), Rational(1));
  return p;
}

Polynomial Polynomial::variable(ContextPtr ctx, std::string_view name) {
  auto v = ctx->find(name);
  if (!v) throw std::invalid_argument("unknown variable: " + std::string(name));
  return variable(std::move(ctx), *v);
}

Polynomial Polynomial::term(ContextPtr ctx, const Monomial& m, const Rational& c) {
  TermMap t;
  t.emplace(m, c);
  return Polynomial(std::move(ctx), std::move(t));
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

std::optional<Rational> Polynomial::constant_value() const {
  if (!is_constant()) return std::nullopt;
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.degree()));
  return d;
}

bool Polynomial::has_params() const {
  auto first = static_cast<VarId>(ctx_->num_state());
  for (const auto& [m, c] : terms_)
    for (const auto& f : m.factors())
      if (f.var >= first) return true;
  return false;
}

bool Polynomial::has_state_vars() const {
  auto first = static_cast<VarId>(ctx_->num_state());
  for (const auto& [m, c] : terms_)
    if (!m.is_one() && m.factors().front().var < first) return true;
  return false;
}

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::check_context(const Polynomial& q) const {
  if (!ctx_->same_as(*q.ctx_)) throw ContextMismatch("polynomials over different variable contexts");
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  check_context(q);
  for (const auto& [m, c] : q.terms_) {
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  check_context(q);
  for (const auto& [m, c] : q.terms_) {
    auto [it, inserted] = terms_.emplace(m, -c);
    if (!inserted) {
      it->second -= c;
      if (it->second == 0) terms_.erase(it);
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  p.check_context(q);
  Polynomial out(p.ctx_);
  for (const auto& [mp, cp] : p.terms_) {
    for (const auto& [mq, cq] : q.terms_) {
      Rational c = cp * cq;
      auto [it, inserted] = out.terms_.emplace(mp * mq, c);
      if (!inserted) {
        it->second += c;
        if (it->second == 0) out.terms_.erase(it);
      }
    }
  }
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& q) { return *this = *this * q; }

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& [m, coef] : terms_) coef *= c;
  }
  return *this;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial result = constant(ctx_, 1);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e > 0) base *= base;
  }
  return result;
}

Polynomial Polynomial::mul_term(const Monomial& m, const Rational& c) const {
  Polynomial out(ctx_);
  if (c == 0) return out;
  for (const auto& [mp, cp] : terms_) out.terms_.emplace_hint(out.terms_.end(), mp * m, cp * c);
  return out;
}

Rational Polynomial::evaluate(std::span<const Rational> values) const {
  if (values.size() < ctx_->size()) throw MissingAssignment("point does not cover the context");
  Rational sum = 0;
  mpq_class power;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& f : m.factors()) {
      mpz_class num, den;
      mpz_pow_ui(num.get_mpz_t(), values[f.var].get_num_mpz_t(), f.exp);
      mpz_pow_ui(den.get_mpz_t(), values[f.var].get_den_mpz_t(), f.exp);
      t *= Rational(num, den);
    }
    sum += t;
  }
  sum.canonicalize();
  return sum;
}

double Polynomial::evaluate(std::span<const double> values) const {
  if (values.size() < ctx_->size()) throw MissingAssignment("point does not cover the context");
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.get_d();
    for (const auto& f : m.factors())
      for (unsigned k = 0; k < f.exp; ++k) t *= values[f.var];
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::substitute(const std::map<VarId, Rational>& values) const {
  Polynomial out(ctx_);
  for (const auto& [m, c] : terms_) {
    Rational coef = c;
    std::vector<VarPower> rest;
    for (const auto& f : m.factors()) {
      auto it = values.find(f.var);
      if (it == values.end()) {
        rest.push_back(f);
        continue;
      }
      for (unsigned k = 0; k < f.exp; ++k) coef *= it->second;
    }
    out += term(ctx_, Monomial(std::move(rest)), coef);
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::vector<const TermMap::value_type*> sorted;
  sorted.reserve(terms_.size());
  for (const auto& t : terms_) sorted.push_back(&t);
  MonomialOrder order = MonomialOrder::grevlex();
  std::sort(sorted.begin(), sorted.end(),
            [&](auto* a, auto* b) { return order.compare(a->first, b->first) > 0; });
  std::ostringstream os;
  bool first = true;
  for (const auto* t : sorted) {
    const Rational& c = t->second;
    const Monomial& m = t->first;
    Rational mag = abs(c);
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    bool unit = mag == 1 && !m.is_one();
    if (!unit) os << mag.get_str();
    bool need_star = !unit;
    for (const auto& f : m.factors()) {
      if (need_star) os << "*";
      os << ctx_->name(f.var);
      if (f.exp > 1) os << "^" << f.exp;
      need_star = true;
    }
  }
  return os.str();
}

bool operator==(const Polynomial& p, const Polynomial& q) {
  return p.ctx_->same_as(*q.ctx_) && p.terms_ == q.terms_;
}

Rational evaluate(const Polynomial& p, const Point& point) {
  const auto& ctx = *p.context();
  std::vector<Rational> values(ctx.size());
  std::vector<bool> used(ctx.size(), false);
  for (const auto& [m, c] : p.terms())
    for (const auto& f : m.factors()) used[f.var] = true;
  for (VarId v = 0; v < ctx.size(); ++v) {
    if (!used[v]) continue;
    auto it = point.find(ctx.name(v));
    if (it == point.end()) throw MissingAssignment("no value for variable " + ctx.name(v));
    values[v] = it->second;
  }
  return p.evaluate(std::span<const Rational>(values));
}

// --------------------------------------------------------------- VectorField

VectorField::VectorField(ContextPtr ctx, std::vector<Polynomial> components)
    : ctx_(std::move(ctx)), components_(std::move(components)) {
  if (components_.size() != ctx_->num_state())
    throw std::invalid_argument("vector field needs one component per state variable (expected " +
                                std::to_string(ctx_->num_state()) + ", got " +
                                std::to_string(components_.size()) + ")");
  for (const auto& c : components_) {
    if (!c.context()->same_as(*ctx_)) throw ContextMismatch("vector field component context");
    if (c.has_params()) throw std::invalid_argument("template parameters may not appear in the vector field");
  }
}

std::string VectorField::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) out += "; ";
    out += ctx_->name(static_cast<VarId>(i)) + "' = " + components_[i].to_string();
  }
  return out;
}

// --------------------------------------------------------- Lie derivatives

std::vector<Polynomial> gradient(const Polynomial& p) {
  const auto& ctx = p.context();
  std::vector<Polynomial::TermMap> parts(ctx->num_state());
  for (const auto& [m, c] : p.terms()) {
    for (const auto& f : m.factors()) {
      if (f.var >= ctx->num_state()) break;
      Monomial dm = m / Monomial::var(f.var);
      Rational dc = c * f.exp;
      auto [it, inserted] = parts[f.var].emplace(dm, dc);
      if (!inserted) it->second += dc;
    }
  }
  std::vector<Polynomial> grad;
  grad.reserve(parts.size());
  for (auto& part : parts) grad.emplace_back(ctx, std::move(part));
  return grad;
}

Polynomial lie_derivative(const Polynomial& p, const VectorField& f) {
  if (!p.context()->same_as(*f.context()))
    throw ContextMismatch("Lie derivative of a polynomial over a different context than the field");
  if (f.dim() != p.context()->num_state())
    throw std::invalid_argument("vector field dimension does not match state variables");
  auto grad = gradient(p);
  Polynomial out(p.context());
  for (std::size_t i = 0; i < grad.size(); ++i)
    if (!grad[i].is_zero() && !f[i].is_zero()) out += grad[i] * f[i];
  return out;
}

std::vector<Polynomial> lie_chain(const Polynomial& p, const VectorField& f, unsigned k) {
  std::vector<Polynomial> chain;
  chain.reserve(k + 1);
  chain.push_back(p);
  for (unsigned i = 0; i < k; ++i) chain.push_back(lie_derivative(chain.back(), f));
  return chain;
}

std::vector<Polynomial> LieChainCache::chain(const Polynomial& p, const VectorField& f, unsigned k) {
  std::vector<Polynomial> known;
  {
    std::lock_guard lock(mutex_);
    auto it = chains_.find({p, f});
    if (it != chains_.end()) {
      if (it->second.size() > k)
        return {it->second.begin(), it->second.begin() + k + 1};
      known = it->second;
    }
  }
  if (known.empty()) known.push_back(p);
  while (known.size() <= k) known.push_back(lie_derivative(known.back(), f));
  std::lock_guard lock(mutex_);
  auto& slot = chains_.try_emplace({p, f}).first->second;
  if (slot.size() < known.size()) slot = known;
  return {known.begin(), known.begin() + k + 1};
}

std::size_t LieChainCache::size() const {
  std::lock_guard lock(mutex_);
  return chains_.size();
}

std::string RankValue::to_string() const {
  return k_ ? std::to_string(*k_) : std::string("inf");
}

PointwiseRank pointwise_rank(std::span<const Polynomial> chain, std::span<const Rational> x0,
                             unsigned bound) {
  if (chain.size() < bound + 1u) throw std::invalid_argument("Lie chain shorter than rank bound");
  for (unsigned k = 0; k <= bound; ++k) {
    Rational v = chain[k].evaluate(x0);
    if (v != 0) return {RankValue::finite(k), v};
  }
  return {RankValue::infinite(), Rational(0)};
}

PointwiseRank pointwise_rank(const Polynomial& p, const VectorField& f, const Point& x0,
                             unsigned bound) {
  auto chain = lie_chain(p, f, bound);
  for (unsigned k = 0; k <= bound; ++k) {
    Rational v = evaluate(chain[k], x0);
    if (v != 0) return {RankValue::finite(k), v};
  }
  return {RankValue::infinite(), Rational(0)};
}

Polynomial instantiate(const Polynomial& p, const Point& params) {
  const auto& ctx = *p.context();
  std::map<VarId, Rational> values;
  for (VarId v = static_cast<VarId>(ctx.num_state()); v < ctx.size(); ++v) {
    auto it = params.find(ctx.name(v));
    if (it == params.end()) throw MissingAssignment("no value for parameter " + ctx.name(v));
    values.emplace(v, it->second);
  }
  return p.substitute(values);
}

}  // namespace sai
