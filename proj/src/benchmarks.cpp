#include "swarmtune/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "swarmtune/errors.hpp"

namespace swarmtune {

double sphere(std::span<const double> x) {
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return sum;
}

double rastrigin(std::span<const double> x) {
  double sum = 10.0 * static_cast<double>(x.size());
  for (double v : x) {
    sum += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  }
  return sum;
}

double rosenbrock(std::span<const double> x) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    sum += 100.0 * a * a + b * b;
  }
  return sum;
}

double benchmark_eval(std::string_view name, std::span<const double> x) {
  if (name == "sphere") return sphere(x);
  if (name == "rastrigin") return rastrigin(x);
  if (name == "rosenbrock") return rosenbrock(x);
  throw ConfigError("unknown benchmark objective: " + std::string(name));
}

}  // namespace swarmtune
