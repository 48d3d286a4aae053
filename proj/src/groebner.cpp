#include "sai/groebner.hpp"

#include <algorithm>
#include <set>

namespace sai {
namespace {

std::mutex g_observer_mutex;
std::vector<BasisObserver> g_observers;

void notify(std::span<const Polynomial> inputs, const GroebnerBasis& basis) {
  std::vector<BasisObserver> observers;
  {
    std::lock_guard lock(g_observer_mutex);
    observers = g_observers;
  }
  for (const auto& obs : observers) obs(inputs, basis);
}

/// Terms sorted descending under a monomial order.
struct Descending {
  const MonomialOrder* order;
  bool operator()(const Monomial& a, const Monomial& b) const { return order->compare(a, b) > 0; }
};
using OrderedTerms = std::map<Monomial, Rational, Descending>;

Polynomial monic(const Polynomial& p, const MonomialOrder& order) {
  Rational lc = p.coefficient(order.leading(p));
  return p * Rational(1 / lc);
}

struct Divisor {
  const Polynomial* poly;
  Monomial lead;
  Rational lead_coef;
};

}  // namespace

Polynomial normal_form(const Polynomial& p, std::span<const Polynomial> basis,
                       const MonomialOrder& order) {
  std::vector<Divisor> divisors;
  divisors.reserve(basis.size());
  for (const auto& g : basis) {
    if (g.is_zero()) throw std::invalid_argument("zero polynomial in division basis");
    if (!g.context()->same_as(*p.context())) throw ContextMismatch("basis over a different context");
    const Monomial& lm = order.leading(g);
    divisors.push_back({&g, lm, g.coefficient(lm)});
  }
  OrderedTerms work(Descending{&order});
  for (const auto& [m, c] : p.terms()) work.emplace(m, c);
  Polynomial::TermMap remainder;
  while (!work.empty()) {
    auto lead = work.begin();
    const Divisor* hit = nullptr;
    for (const auto& d : divisors) {
      if (d.lead.divides(lead->first)) {
        hit = &d;
        break;
      }
    }
    if (hit == nullptr) {
      remainder.emplace(lead->first, lead->second);
      work.erase(lead);
      continue;
    }
    Monomial shift = lead->first / hit->lead;
    Rational factor = lead->second / hit->lead_coef;
    for (const auto& [m, c] : hit->poly->terms()) {
      Monomial prod = m * shift;
      Rational delta = c * factor;
      auto [it, inserted] = work.emplace(prod, -delta);
      if (!inserted) {
        it->second -= delta;
        if (it->second == 0) work.erase(it);
      }
    }
  }
  return Polynomial(p.context(), std::move(remainder));
}

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, const MonomialOrder& order) {
  const Monomial& lf = order.leading(f);
  const Monomial& lg = order.leading(g);
  Monomial l = lcm(lf, lg);
  Polynomial a = f.mul_term(l / lf, Rational(1 / f.coefficient(lf)));
  Polynomial b = g.mul_term(l / lg, Rational(1 / g.coefficient(lg)));
  return a - b;
}

GroebnerBasis buchberger(std::span<const Polynomial> gens, const MonomialOrder& order) {
  std::vector<Polynomial> basis;
  for (const auto& g : gens)
    if (!g.is_zero()) basis.push_back(monic(g, order));
  if (basis.empty()) {
    GroebnerBasis zero{{}, order};
    notify(gens, zero);
    return zero;
  }

  std::vector<Monomial> leads;
  for (const auto& g : basis) leads.push_back(order.leading(g));

  std::set<std::pair<std::size_t, std::size_t>> pending;
  for (std::size_t j = 1; j < basis.size(); ++j)
    for (std::size_t i = 0; i < j; ++i) pending.emplace(i, j);

  auto in_pending = [&](std::size_t a, std::size_t b) {
    return pending.count({std::min(a, b), std::max(a, b)}) > 0;
  };
  // Chain criterion: some third generator's leading term divides the lcm
  // and both of its pairs with i and j were already treated.
  auto chain_redundant = [&](std::size_t i, std::size_t j, const Monomial& l) {
    for (std::size_t k = 0; k < basis.size(); ++k) {
      if (k == i || k == j) continue;
      if (leads[k].divides(l) && !in_pending(i, k) && !in_pending(j, k)) return true;
    }
    return false;
  };

  while (!pending.empty()) {
    // Normal selection strategy: smallest lcm first.
    auto best = pending.begin();
    Monomial best_lcm = lcm(leads[best->first], leads[best->second]);
    for (auto it = std::next(pending.begin()); it != pending.end(); ++it) {
      Monomial l = lcm(leads[it->first], leads[it->second]);
      if (order.compare(l, best_lcm) < 0) {
        best = it;
        best_lcm = std::move(l);
      }
    }
    auto [i, j] = *best;
    pending.erase(best);
    if (coprime(leads[i], leads[j])) continue;
    if (chain_redundant(i, j, best_lcm)) continue;
    Polynomial r = normal_form(s_polynomial(basis[i], basis[j], order), basis, order);
    if (r.is_zero()) continue;
    basis.push_back(monic(r, order));
    leads.push_back(order.leading(basis.back()));
    std::size_t n = basis.size() - 1;
    for (std::size_t k = 0; k < n; ++k) pending.emplace(k, n);
  }

  // Minimalize, then inter-reduce.
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    bool redundant = false;
    for (std::size_t k = 0; k < basis.size() && !redundant; ++k) {
      if (k == i || !leads[k].divides(leads[i])) continue;
      // Equal leading terms: keep the earliest.
      redundant = leads[k] != leads[i] || k < i;
    }
    if (!redundant) keep.push_back(i);
  }
  std::vector<Polynomial> minimal;
  for (auto i : keep) minimal.push_back(basis[i]);
  std::vector<Polynomial> reduced;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<Polynomial> others;
    for (std::size_t k = 0; k < minimal.size(); ++k)
      if (k != i) others.push_back(minimal[k]);
    // Leading term survives because no other leading term divides it.
    reduced.push_back(monic(normal_form(minimal[i], others, order), order));
  }
  std::sort(reduced.begin(), reduced.end(), [&](const Polynomial& a, const Polynomial& b) {
    return order.compare(order.leading(a), order.leading(b)) < 0;
  });
  GroebnerBasis result{std::move(reduced), order};
  notify(gens, result);
  return result;
}

bool ideal_member(const Polynomial& p, std::span<const Polynomial> gens, const MonomialOrder& order) {
  if (p.is_zero()) return true;
  GroebnerBasis g = buchberger(gens, order);
  if (g.zero_ideal()) return false;
  return normal_form(p, g.generators, order).is_zero();
}

bool verify_basis(const GroebnerBasis& basis, std::span<const Polynomial> inputs) {
  const auto& gens = basis.generators;
  if (gens.empty()) {
    return std::all_of(inputs.begin(), inputs.end(), [](const Polynomial& p) { return p.is_zero(); });
  }
  for (const auto& p : inputs)
    if (!normal_form(p, gens, basis.order).is_zero()) return false;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (!normal_form(s_polynomial(gens[i], gens[j], basis.order), gens, basis.order).is_zero())
        return false;
  return true;
}

ScopedBasisObserver::ScopedBasisObserver(BasisObserver observer) {
  std::lock_guard lock(g_observer_mutex);
  g_observers.push_back(std::move(observer));
}

ScopedBasisObserver::~ScopedBasisObserver() {
  std::lock_guard lock(g_observer_mutex);
  g_observers.pop_back();
}

RankBound rank_bound(const Polynomial& p, const VectorField& f, unsigned cap,
                     const MonomialOrder& order) {
  if (cap < 1) throw std::invalid_argument("rank cap must be at least 1");
  RankBound out;
  out.chain.push_back(p);
  std::vector<Polynomial> basis;  // generates <L^0 .. L^i>
  for (unsigned i = 0; i <= cap; ++i) {
    out.chain.push_back(lie_derivative(out.chain.back(), f));
    const Polynomial& next = out.chain.back();
    if (next.is_zero()) {
      out.value = i;
      return out;
    }
    std::vector<Polynomial> gens = basis;
    gens.push_back(out.chain[i]);
    GroebnerBasis g = buchberger(gens, order);
    basis = g.generators;
    if (!g.zero_ideal() && normal_form(next, g.generators, order).is_zero()) {
      out.value = i;
      return out;
    }
  }
  throw FixedPointNotReached(cap);
}

RankBound parametric_rank_bound(const Polynomial& p, const VectorField& f, unsigned cap,
                                const MonomialOrder& order) {
  if (!p.context()->same_as(*f.context())) throw ContextMismatch("template and field contexts differ");
  // Parameters are ordinary ring variables after the state variables, so the
  // plain search already runs in Q[x, u].
  return rank_bound(p, f, cap, order);
}

RankOracle::RankOracle(VectorField field, unsigned cap, MonomialOrder order)
    : field_(std::move(field)), cap_(cap), order_(std::move(order)) {}

std::shared_ptr<const RankBound> RankOracle::bound(const Polynomial& p) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(p); it != cache_.end()) return it->second;
    // -p spans the same ideals, so reuse its chain negated.
    if (auto it = cache_.find(-p); it != cache_.end()) {
      auto negated = std::make_shared<RankBound>();
      negated->value = it->second->value;
      for (const auto& q : it->second->chain) negated->chain.push_back(-q);
      cache_.emplace(p, negated);
      return negated;
    }
  }
  auto computed = std::make_shared<const RankBound>(rank_bound(p, field_, cap_, order_));
  std::lock_guard lock(mutex_);
  return cache_.emplace(p, computed).first->second;
}

std::vector<std::pair<Polynomial, unsigned>> RankOracle::computed() const {
  std::lock_guard lock(mutex_);
  std::vector<std::pair<Polynomial, unsigned>> out;
  for (const auto& [p, b] : cache_) out.emplace_back(p, b->value);
  return out;
}

}  // namespace sai
