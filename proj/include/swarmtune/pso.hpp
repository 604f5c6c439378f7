#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "swarmtune/objective.hpp"
#include "swarmtune/search_space.hpp"
#include "swarmtune/trace.hpp"

namespace swarmtune {

struct PsoConfig {
  std::size_t swarm_size = 5;
  std::size_t iterations = 5;
  double inertia_w = 0.729;
  double cognitive_c1 = 1.49445;
  double social_c2 = 1.49445;
  std::uint64_t seed = 0;
  /// Draw r1/r2 per dimension instead of one scalar pair per particle.
  bool per_dimension_r = false;
  /// Called after every objective evaluation (progress reporting only; has
  /// no effect on the search).
  std::function<void(const TraceRecord&)> on_evaluation;
};

struct Particle {
  Position position;
  std::vector<double> velocity;
  Position pbest;
  double pbest_fitness = 0.0;
};

/// w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x), elementwise, with one
/// scalar r1 and one scalar r2 for the whole vector.
std::vector<double> pso_velocity_update(const std::vector<double>& velocity, const Position& x,
                                        const Position& pbest, const Position& gbest, double w,
                                        double c1, double c2, double r1, double r2);

/// Particle swarm search. Initialization evaluates every particle once;
/// each iteration updates velocity then position, clips, evaluates, and
/// updates pbest and the global best immediately per particle. Total
/// evaluations: swarm_size * (1 + iterations). Deterministic per seed.
OptimizationResult pso_run(const SearchSpace& space, Objective& objective, const PsoConfig& config);

}  // namespace swarmtune
