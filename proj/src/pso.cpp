#include "swarmtune/pso.hpp"

#include <cmath>

#include "eval_recorder.hpp"
#include "swarmtune/errors.hpp"
#include "swarmtune/rng.hpp"

namespace swarmtune {

namespace {

void check_pso_config(const PsoConfig& config) {
  if (config.swarm_size < 1) throw ConfigError("pso: swarm_size must be >= 1");
  if (config.iterations < 1) throw ConfigError("pso: iterations must be >= 1");
  const std::pair<double, const char*> coefficients[] = {{config.inertia_w, "inertia_w"},
                                                         {config.cognitive_c1, "cognitive_c1"},
                                                         {config.social_c2, "social_c2"}};
  for (auto [value, key] : coefficients) {
    if (!std::isfinite(value) || value < 0.0) {
      throw ConfigError(std::string("pso: ") + key + " must be finite and >= 0");
    }
  }
}

void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("pso velocity update: vector lengths differ");
}

}  // namespace

std::vector<double> pso_velocity_update(const std::vector<double>& velocity, const Position& x,
                                        const Position& pbest, const Position& gbest, double w,
                                        double c1, double c2, double r1, double r2) {
  check_same_length(velocity.size(), x.size());
  check_same_length(x.size(), pbest.size());
  check_same_length(x.size(), gbest.size());
  std::vector<double> out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    out[d] = w * velocity[d] + c1 * r1 * (pbest[d] - x[d]) + c2 * r2 * (gbest[d] - x[d]);
  }
  return out;
}

OptimizationResult pso_run(const SearchSpace& space, Objective& objective, const PsoConfig& config) {
  check_pso_config(config);
  Rng rng(config.seed);
  const std::size_t dims = space.size();
  detail::EvalRecorder recorder{space, objective, config.on_evaluation};

  std::vector<Particle> swarm(config.swarm_size);
  for (auto& particle : swarm) {
    particle.position = space.sample(rng);
    particle.velocity.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      const double range = space.param(d).upper - space.param(d).lower;
      particle.velocity[d] = rng.uniform(-0.5 * range, 0.5 * range);
    }
    particle.pbest = particle.position;
    particle.pbest_fitness = recorder.evaluate(particle.position, 0);
  }
  // The recorder's running best is exactly the swarm's gbest: first
  // achiever on ties, updated per evaluation.

  for (std::size_t iter = 1; iter <= config.iterations; ++iter) {
    for (auto& particle : swarm) {
      if (config.per_dimension_r) {
        for (std::size_t d = 0; d < dims; ++d) {
          const double r1 = rng.uniform();
          const double r2 = rng.uniform();
          particle.velocity[d] = config.inertia_w * particle.velocity[d] +
                                 config.cognitive_c1 * r1 * (particle.pbest[d] - particle.position[d]) +
                                 config.social_c2 * r2 * (recorder.best_position[d] - particle.position[d]);
        }
      } else {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        particle.velocity =
            pso_velocity_update(particle.velocity, particle.position, particle.pbest,
                                recorder.best_position, config.inertia_w, config.cognitive_c1,
                                config.social_c2, r1, r2);
      }
      for (std::size_t d = 0; d < dims; ++d) {
        particle.position[d] += particle.velocity[d];
      }
      particle.position = space.clip(particle.position);
      const double fitness = recorder.evaluate(particle.position, iter);
      if (fitness < particle.pbest_fitness) {
        particle.pbest = particle.position;
        particle.pbest_fitness = fitness;
      }
    }
  }
  return recorder.finish();
}

}  // namespace swarmtune
