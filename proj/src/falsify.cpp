#include "sai/falsify.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <random>
#include <thread>

namespace sai {
namespace {

constexpr double kDivergence = 1e150;

/// Field evaluation with a reusable buffer padded for template parameters.
class FieldEval {
 public:
  explicit FieldEval(const VectorField& f) : f_(f), buf_(f.context()->size(), 0.0) {}

  void operator()(std::span<const double> x, std::vector<double>& out) {
    std::copy(x.begin(), x.end(), buf_.begin());
    out.resize(f_.dim());
    for (std::size_t i = 0; i < f_.dim(); ++i) out[i] = f_[i].evaluate(std::span<const double>(buf_));
  }

 private:
  const VectorField& f_;
  std::vector<double> buf_;
};

std::vector<double> step_with(FieldEval& eval, std::span<const double> x, double h) {
  std::size_t n = x.size();
  std::vector<double> k1, k2, k3, k4, tmp(n);
  eval(x, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  eval(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  eval(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  eval(tmp, k4);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  return out;
}

bool finite_state(const std::vector<double>& x) {
  for (double v : x)
    if (!std::isfinite(v) || std::abs(v) > kDivergence) return false;
  return true;
}

double padded_eval(const Polynomial& p, std::span<const double> state) {
  std::vector<double> buf(p.context()->size(), 0.0);
  std::copy(state.begin(), state.end(), buf.begin());
  return p.evaluate(std::span<const double>(buf));
}

bool holds_numeric(const DnfForm& set, std::span<const double> state, double slack) {
  if (set.is_true()) return true;
  if (set.is_false()) return false;
  std::size_t size = set.disjuncts.front().empty() ? state.size()
                                                   : set.disjuncts.front().front().poly.context()->size();
  std::vector<double> buf(std::max(size, state.size()), 0.0);
  std::copy(state.begin(), state.end(), buf.begin());
  return evaluate_numeric(set, buf, slack);
}

}  // namespace

std::vector<double> rk4_step(const VectorField& f, std::span<const double> x, double h) {
  FieldEval eval(f);
  return step_with(eval, x, h);
}

Trajectory integrate(const VectorField& f, std::span<const double> x0, const SampleBudget& budget,
                     Direction direction) {
  if (!(budget.step > 0) || !(budget.horizon > 0)) throw std::invalid_argument("step and horizon must be positive");
  if (x0.size() != f.dim()) throw std::invalid_argument("initial state has the wrong dimension");
  Trajectory traj;
  traj.step = budget.step;
  traj.direction = direction;
  FieldEval eval(f);
  double h = direction == Direction::Forward ? budget.step : -budget.step;
  auto steps = static_cast<std::size_t>(std::llround(budget.horizon / budget.step));
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.states.emplace_back(x0.begin(), x0.end());
  for (std::size_t k = 1; k <= steps; ++k) {
    std::vector<double> next = step_with(eval, traj.states.back(), h);
    if (!finite_state(next)) {
      traj.diverged = true;
      break;
    }
    traj.times.push_back(static_cast<double>(k) * budget.step);
    traj.states.push_back(std::move(next));
  }
  return traj;
}

void write_csv(const Trajectory& traj, const std::vector<std::string>& names, std::ostream& out) {
  out << "t";
  for (const auto& n : names) out << "," << n;
  out << "\n" << std::setprecision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << (traj.direction == Direction::Forward ? traj.times[k] : -traj.times[k]);
    for (double v : traj.states[k]) out << "," << v;
    out << "\n";
  }
}

NumericCheckResult numeric_ci_check(const Problem& prob, const Formula& candidate, const SampleBudget& budget) {
  if (candidate.has_params()) throw std::invalid_argument("candidate must be closed");
  if (!(budget.tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  std::vector<std::string> vars = prob.ctx->state_names();
  std::size_t n = vars.size();
  NumericCheckResult result;

  // Initial points: exact when the initial set is finite, otherwise
  // rejection sampling with variables fixed by top-level equations pinned.
  std::vector<std::vector<double>> starts;
  std::vector<std::optional<Point>> exact;
  Formula init = simplify(prob.init);
  if (auto points = pinned_points(init, vars)) {
    for (const auto& pt : *points) {
      if (starts.size() >= budget.n_init_points) break;
      std::vector<double> x;
      for (const auto& v : vars) x.push_back(pt.at(v).get_d());
      starts.push_back(std::move(x));
      exact.push_back(pt);
    }
  } else {
    std::vector<std::optional<Rational>> fixed(n);
    std::vector<Formula> conj = init.kind() == Formula::Kind::And ? init.children() : std::vector<Formula>{init};
    for (const auto& a : conj) {
      if (auto pts = pinned_points(a, {}); pts && pts->size() == 1) {
        for (const auto& [name, value] : pts->front())
          if (auto id = prob.ctx->find(name)) fixed[*id] = value;
      }
    }
    std::mt19937_64 rng(budget.seed);
    std::uniform_real_distribution<double> coord(-budget.box, budget.box);
    std::vector<Rational> exact_point(prob.ctx->size(), Rational(0));
    for (std::size_t attempt = 0; attempt < budget.max_attempts && starts.size() < budget.n_init_points; ++attempt) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = fixed[i] ? fixed[i]->get_d() : coord(rng);
        exact_point[i] = fixed[i] ? *fixed[i] : Rational(x[i]);
      }
      if (evaluate(init, exact_point)) {
        starts.push_back(std::move(x));
        exact.push_back(std::nullopt);
      }
    }
  }
  if (starts.empty()) {
    result.kind = NumericCheckResult::Kind::SamplingFailed;
    result.message = "no initial point found within the sampling budget";
    return result;
  }

  DnfForm domain = normalize_dnf(prob.domain);
  DnfForm cand = normalize_dnf(candidate);
  struct Hit {
    bool found = false;
    double time = 0;
  };
  std::vector<Hit> hits(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      if (cand.is_true()) continue;
      Trajectory traj = integrate(prob.field, starts[i], budget);
      for (std::size_t k = 0; k < traj.times.size(); ++k) {
        if (!holds_numeric(domain, traj.states[k], budget.tolerance)) break;
        if (!holds_numeric(cand, traj.states[k], budget.tolerance)) {
          hits[i] = {true, traj.times[k]};
          break;
        }
      }
    }
  };
  std::size_t threads = std::min<std::size_t>(std::max(1u, budget.workers), starts.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  result.samples = starts.size();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (!hits[i].found) continue;
    result.kind = NumericCheckResult::Kind::Violation;
    result.x0 = starts[i];
    result.exact_x0 = exact[i];
    result.time = hits[i].time;
    result.message = "trajectory leaves the candidate while inside the domain";
    return result;
  }
  result.message = "no violation across " + std::to_string(starts.size()) + " initial points";
  return result;
}

SignProbe sign_probe(const Polynomial& p, const VectorField& f, const Point& x0, unsigned bound, double step,
                     unsigned probes, double noise_floor) {
  SignProbe out;
  std::vector<Polynomial> chain = lie_chain(p, f, bound);
  std::vector<Rational> exact(p.context()->size(), Rational(0));
  std::vector<double> state;
  for (std::size_t i = 0; i < p.context()->size(); ++i) {
    auto it = x0.find(p.context()->name(static_cast<VarId>(i)));
    if (it != x0.end()) exact[i] = it->second;
    if (i < p.context()->num_state()) state.push_back(exact[i].get_d());
  }
  out.predicted = pointwise_rank(chain, exact, bound);
  SampleBudget budget;
  budget.step = step;
  budget.horizon = step * probes;
  Trajectory traj = integrate(f, state, budget);
  for (std::size_t k = 1; k < traj.states.size(); ++k) out.observed.push_back(padded_eval(p, traj.states[k]));

  std::size_t above = 0, mismatched = 0;
  int expected = out.predicted.rank.is_finite() ? sign(out.predicted.value) : 0;
  for (double v : out.observed) {
    if (std::abs(v) < noise_floor) continue;
    ++above;
    if ((v > 0 ? 1 : -1) != expected) ++mismatched;
  }
  if (!out.predicted.rank.is_finite()) {
    out.outcome = above == 0 ? SignProbe::Outcome::Agree : SignProbe::Outcome::Disagree;
    if (above) out.details = std::to_string(above) + " probes above the noise floor for an infinite rank";
    return out;
  }
  if (above == 0) {
    out.outcome = SignProbe::Outcome::BelowNoiseFloor;
    out.details = "all probes within the noise floor";
  } else if (mismatched) {
    out.outcome = SignProbe::Outcome::Disagree;
    out.details = std::to_string(mismatched) + " of " + std::to_string(above) + " probes have the wrong sign";
  }
  return out;
}

}  // namespace sai
