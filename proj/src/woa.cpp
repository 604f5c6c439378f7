#include "swarmtune/woa.hpp"

#include <cmath>
#include <numbers>

#include "eval_recorder.hpp"
#include "swarmtune/errors.hpp"

namespace swarmtune {

namespace {

void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionError("woa position update: vector lengths differ");
}

}  // namespace

double woa_linear_a(std::size_t iteration, std::size_t max_iterations) {
  return 2.0 - 2.0 * static_cast<double>(iteration) / static_cast<double>(max_iterations);
}

WoaCoefficients woa_coefficients(double a, double r1, double r2, double l, double sw) {
  WoaCoefficients coeffs;
  coeffs.a = a;
  coeffs.A = 2.0 * a * r1 - a;
  coeffs.C = 2.0 * r2;
  coeffs.l = l;
  coeffs.sw = sw;
  return coeffs;
}

WoaCoefficients woa_coefficients(std::size_t iteration, std::size_t max_iterations, Rng& rng) {
  const double a = woa_linear_a(iteration, max_iterations);
  const double r1 = rng.uniform();
  const double r2 = rng.uniform();
  const double l = rng.uniform(-1.0, 1.0);
  const double sw = rng.uniform();
  return woa_coefficients(a, r1, r2, l, sw);
}

Position woa_encircle(const Position& target, const Position& x, double A, double C) {
  check_same_length(target.size(), x.size());
  Position out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    out[d] = target[d] - A * std::abs(C * target[d] - x[d]);
  }
  return out;
}

Position woa_spiral(const Position& x, const Position& best, double l, double b) {
  check_same_length(best.size(), x.size());
  const double factor = std::exp(b * l) * std::cos(2.0 * std::numbers::pi * l);
  Position out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    out[d] = std::abs(best[d] - x[d]) * factor + best[d];
  }
  return out;
}

Position woa_position_update(const Position& x, const Position& best, const Position& rand_whale,
                             const WoaCoefficients& coeffs, double b) {
  if (coeffs.sw < 0.5) {
    if (std::abs(coeffs.A) < 1.0) return woa_encircle(best, x, coeffs.A, coeffs.C);
    return woa_encircle(rand_whale, x, coeffs.A, coeffs.C);
  }
  return woa_spiral(x, best, coeffs.l, b);
}

OptimizationResult woa_run(const SearchSpace& space, Objective& objective, const WoaConfig& config) {
  if (config.population_size < 1) throw ConfigError("woa: population_size must be >= 1");
  if (config.iterations < 1) throw ConfigError("woa: iterations must be >= 1");
  if (!std::isfinite(config.spiral_b)) throw ConfigError("woa: spiral_b must be finite");

  Rng rng(config.seed);
  detail::EvalRecorder recorder{space, objective, config.on_evaluation};

  std::vector<Position> whales(config.population_size);
  for (auto& whale : whales) {
    whale = space.sample(rng);
    recorder.evaluate(whale, 0);
  }

  for (std::size_t iter = 1; iter <= config.iterations; ++iter) {
    for (auto& whale : whales) {
      const auto coeffs = woa_coefficients(iter, config.iterations, rng);
      Position next;
      if (config.literal_spiral) {
        next = woa_spiral(whale, recorder.best_position, coeffs.l, config.spiral_b);
      } else if (coeffs.sw < 0.5 && std::abs(coeffs.A) >= 1.0) {
        // Exploration draws its partner lazily so the branch pattern is
        // the only thing that consumes it.
        const auto& partner = whales[rng.index(config.population_size)];
        next = woa_encircle(partner, whale, coeffs.A, coeffs.C);
      } else {
        next = woa_position_update(whale, recorder.best_position, whale, coeffs, config.spiral_b);
      }
      whale = space.clip(next);
      recorder.evaluate(whale, iter);
    }
  }
  return recorder.finish();
}

}  // namespace swarmtune
