#include "sai/monomial_order.hpp"

#include <limits>
#include <stdexcept>

namespace sai {
namespace {

constexpr std::size_t kUnlisted = std::numeric_limits<std::size_t>::max();

}  // namespace

MonomialOrder::MonomialOrder(Kind kind, std::vector<VarId> precedence) : kind_(kind) {
  for (std::size_t pos = 0; pos < precedence.size(); ++pos) {
    VarId v = precedence[pos];
    if (rank_.size() <= v) rank_.resize(v + 1, kUnlisted);
    if (rank_[v] != kUnlisted) throw std::invalid_argument("duplicate variable in precedence");
    rank_[v] = pos;
  }
  // Unlisted variables rank after every listed one, in id order.
  offset_ = precedence.size();
  for (std::size_t v = 0; v < rank_.size(); ++v)
    if (rank_[v] == kUnlisted) rank_[v] = offset_ + v;
}

MonomialOrder MonomialOrder::parse(const std::string& name) {
  if (name == "grevlex") return MonomialOrder(Kind::GradedReverseLex);
  if (name == "lex") return MonomialOrder(Kind::Lex);
  if (name == "grlex" || name == "deglex") return MonomialOrder(Kind::GradedLex);
  throw std::invalid_argument("unknown monomial order: " + name);
}

std::string MonomialOrder::name() const {
  switch (kind_) {
    case Kind::GradedReverseLex: return "grevlex";
    case Kind::Lex: return "lex";
    case Kind::GradedLex: return "grlex";
  }
  return "?";
}

int MonomialOrder::compare(const Monomial& a, const Monomial& b) const {
  if (kind_ != Kind::Lex) {
    unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db ? -1 : 1;
  }
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  bool reverse = kind_ == Kind::GradedReverseLex;
  bool found = false;
  std::size_t best_rank = 0;
  int result = 0;
  auto consider = [&](VarId v, unsigned ea, unsigned eb) {
    std::size_t r = rank(v);
    bool better = !found || (reverse ? r > best_rank : r < best_rank);
    if (!better) return;
    found = true;
    best_rank = r;
    // lex: larger exponent on the most significant variable wins.
    // grevlex: smaller exponent on the least significant variable wins.
    result = reverse ? (ea < eb ? 1 : -1) : (ea > eb ? 1 : -1);
  };
  std::size_t i = 0, j = 0;
  while (i < fa.size() || j < fb.size()) {
    if (j == fb.size() || (i < fa.size() && fa[i].var < fb[j].var)) {
      consider(fa[i].var, fa[i].exp, 0);
      ++i;
    } else if (i == fa.size() || fb[j].var < fa[i].var) {
      consider(fb[j].var, 0, fb[j].exp);
      ++j;
    } else {
      if (fa[i].exp != fb[j].exp) consider(fa[i].var, fa[i].exp, fb[j].exp);
      ++i;
      ++j;
    }
  }
  return result;
}

const Monomial& MonomialOrder::leading(const Polynomial& p) const {
  if (p.is_zero()) throw std::invalid_argument("leading monomial of zero polynomial");
  const Monomial* best = nullptr;
  for (const auto& [m, c] : p.terms())
    if (best == nullptr || compare(m, *best) > 0) best = &m;
  return *best;
}

}  // namespace sai
