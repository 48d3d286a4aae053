#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include "sai/monomial_order.hpp"
#include "sai/polynomial.hpp"

namespace sai {

/// Reduced Groebner basis: monic generators sorted by leading monomial.
/// An empty generator list is the zero ideal.
struct GroebnerBasis {
  std::vector<Polynomial> generators;
  MonomialOrder order;

  bool zero_ideal() const { return generators.empty(); }
};

/// Full multivariate division remainder of p by `basis`.
/// Throws std::invalid_argument if the basis contains the zero polynomial.
Polynomial normal_form(const Polynomial& p, std::span<const Polynomial> basis,
                       const MonomialOrder& order);

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g, const MonomialOrder& order);

/// Buchberger's algorithm with the coprime-leading-term and chain criteria.
/// Zero generators are dropped.
GroebnerBasis buchberger(std::span<const Polynomial> gens, const MonomialOrder& order);

bool ideal_member(const Polynomial& p, std::span<const Polynomial> gens, const MonomialOrder& order);

/// Every input reduces to zero modulo the basis and every S-polynomial of
/// basis pairs reduces to zero.
bool verify_basis(const GroebnerBasis& basis, std::span<const Polynomial> inputs);

/// Receives every basis computed by buchberger() while installed.
using BasisObserver = std::function<void(std::span<const Polynomial> inputs, const GroebnerBasis&)>;

class ScopedBasisObserver {
 public:
  explicit ScopedBasisObserver(BasisObserver observer);
  ~ScopedBasisObserver();
  ScopedBasisObserver(const ScopedBasisObserver&) = delete;
  ScopedBasisObserver& operator=(const ScopedBasisObserver&) = delete;
};

inline constexpr unsigned kDefaultRankCap = 20;

/// N with L^{N+1} p in <L^0 p, ..., L^N p>, minimal. `chain` holds
/// L^0 p .. L^{N+1} p.
struct RankBound {
  unsigned value = 0;
  std::vector<Polynomial> chain;
};

struct FixedPointNotReached : std::runtime_error {
  explicit FixedPointNotReached(unsigned cap_)
      : std::runtime_error("Lie-derivative ideal chain did not stabilize within " +
                           std::to_string(cap_) + " derivatives"),
        cap(cap_) {}
  unsigned cap;
};

RankBound rank_bound(const Polynomial& p, const VectorField& f, unsigned cap = kDefaultRankCap,
                     const MonomialOrder& order = MonomialOrder::grevlex());

/// Same fixed-point search with template parameters adjoined as ring
/// variables; the result bounds the pointwise rank of every instantiation.
RankBound parametric_rank_bound(const Polynomial& p, const VectorField& f,
                                unsigned cap = kDefaultRankCap,
                                const MonomialOrder& order = MonomialOrder::grevlex());

/// Rank bounds for one vector field, cached per polynomial. Thread-safe.
class RankOracle {
 public:
  explicit RankOracle(VectorField field, unsigned cap = kDefaultRankCap,
                      MonomialOrder order = MonomialOrder::grevlex());

  const VectorField& field() const { return field_; }
  unsigned cap() const { return cap_; }

  /// Throws FixedPointNotReached.
  std::shared_ptr<const RankBound> bound(const Polynomial& p);

  /// (polynomial, N) for every bound computed so far, in polynomial order.
  std::vector<std::pair<Polynomial, unsigned>> computed() const;

 private:
  VectorField field_;
  unsigned cap_;
  MonomialOrder order_;
  mutable std::mutex mutex_;
  std::map<Polynomial, std::shared_ptr<const RankBound>> cache_;
};

}  // namespace sai
