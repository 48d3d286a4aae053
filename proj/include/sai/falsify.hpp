#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sai/encoding.hpp"

namespace sai {

struct SampleBudget {
  std::size_t n_init_points = 100;
  double horizon = 10.0;
  double step = 1e-3;
  double tolerance = 1e-6;
  std::uint64_t seed = 1;
  /// Half-width of the sampling box for variables the initial set leaves free.
  double box = 10.0;
  std::size_t max_attempts = 100000;
  unsigned workers = 4;
};

enum class Direction { Forward, Backward };

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  double step = 0;
  Direction direction = Direction::Forward;
  bool diverged = false;
};

/// One classical RK4 step of size h (negative h runs time backwards).
std::vector<double> rk4_step(const VectorField& f, std::span<const double> x, double h);

/// Fixed-step RK4 over [0, horizon]. Backward integrates -f, so states[k]
/// approximates x(x0; -times[k]).
Trajectory integrate(const VectorField& f, std::span<const double> x0, const SampleBudget& budget,
                     Direction direction = Direction::Forward);

/// time, then one column per state variable.
void write_csv(const Trajectory& traj, const std::vector<std::string>& names, std::ostream& out);

struct NumericCheckResult {
  enum class Kind { NoViolationFound, Violation, SamplingFailed };
  Kind kind = Kind::NoViolationFound;
  std::vector<double> x0;
  /// Exact initial point when the initial set is finite.
  std::optional<Point> exact_x0;
  double time = 0;
  std::size_t samples = 0;
  std::string message;
};

/// Samples initial points, integrates forward, and reports the first sample
/// time at which a trajectory that has stayed in the domain (within the
/// tolerance) leaves `candidate` by more than the tolerance.
NumericCheckResult numeric_ci_check(const Problem& prob, const Formula& candidate, const SampleBudget& budget);

struct SignProbe {
  enum class Outcome { Agree, Disagree, BelowNoiseFloor };
  Outcome outcome = Outcome::Agree;
  PointwiseRank predicted{RankValue::infinite(), 0};
  std::vector<double> observed;  // p(x(k*step)), k = 1..probes
  std::string details;
};

/// Compares the sign predicted by the first nonzero Lie derivative at x0
/// with p sampled along the forward trajectory at step, 2*step, ...
SignProbe sign_probe(const Polynomial& p, const VectorField& f, const Point& x0, unsigned bound,
                     double step = 1e-3, unsigned probes = 10, double noise_floor = 1e-9);

}  // namespace sai
