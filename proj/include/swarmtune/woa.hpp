#pragma once

#include <cstdint>
#include <functional>

#include "swarmtune/objective.hpp"
#include "swarmtune/rng.hpp"
#include "swarmtune/search_space.hpp"
#include "swarmtune/trace.hpp"

namespace swarmtune {

struct WoaConfig {
  std::size_t population_size = 5;
  std::size_t iterations = 10;
  double spiral_b = 1.0;
  std::uint64_t seed = 0;
  /// Apply the spiral move unconditionally every update instead of the
  /// canonical 50/50 switch between encircling and spiral.
  bool literal_spiral = false;
  /// Called after every objective evaluation (progress reporting only; has
  /// no effect on the search).
  std::function<void(const TraceRecord&)> on_evaluation;
};

/// Per-update coefficient bundle. a decays linearly 2 -> 0 across the run;
/// A = 2*a*r1 - a, C = 2*r2, l uniform on [-1,1], sw uniform on [0,1).
struct WoaCoefficients {
  double a = 0.0;
  double A = 0.0;
  double C = 0.0;
  double l = 0.0;
  double sw = 0.0;
};

/// The decay schedule: 2 * (1 - iteration / max_iterations), valid for
/// 0 <= iteration <= max_iterations, exactly 2 at 0 and exactly 0 at the end.
double woa_linear_a(std::size_t iteration, std::size_t max_iterations);

/// Assembles the bundle from raw uniform draws: A = 2*a*r1 - a, C = 2*r2.
WoaCoefficients woa_coefficients(double a, double r1, double r2, double l, double sw);

WoaCoefficients woa_coefficients(std::size_t iteration, std::size_t max_iterations, Rng& rng);

/// Shrinking-encircling move: target - A*|C*target - x|, elementwise.
Position woa_encircle(const Position& target, const Position& x, double A, double C);

/// Log-spiral move around best: |best - x| * e^(b*l) * cos(2*pi*l) + best.
Position woa_spiral(const Position& x, const Position& best, double l, double b);

/// Canonical branch selection: sw < 0.5 encircles the best (|A| < 1) or a
/// random whale (|A| >= 1); sw >= 0.5 spirals around the best. The result
/// is pre-clip.
Position woa_position_update(const Position& x, const Position& best, const Position& rand_whale,
                             const WoaCoefficients& coeffs, double b);

/// Whale search. Initialization samples and evaluates the population; each
/// iteration moves every whale, clips, evaluates, and updates the best on
/// strict improvement. Total evaluations: population_size * (1 + iterations).
/// Deterministic per seed.
OptimizationResult woa_run(const SearchSpace& space, Objective& objective, const WoaConfig& config);

}  // namespace swarmtune
