#pragma once

#include <span>
#include <string_view>

namespace swarmtune {

double sphere(std::span<const double> x);
double rastrigin(std::span<const double> x);
double rosenbrock(std::span<const double> x);

/// Dispatch by name ("sphere", "rastrigin", "rosenbrock").
/// Unknown names throw ConfigError.
double benchmark_eval(std::string_view name, std::span<const double> x);

}  // namespace swarmtune
