#pragma once

#include <string>
#include <string_view>

#include "swarmtune/benchmarks.hpp"
#include "swarmtune/search_space.hpp"

namespace swarmtune {

/// Maps a candidate position to a scalar fitness to minimize. Evaluations
/// must be deterministic for a fixed candidate and fixed objective seed,
/// and must return a finite value (failures are mapped, not propagated,
/// where the contract says so).
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double evaluate(const Position& candidate, const SearchSpace& space) = 0;

  virtual std::string_view name() const = 0;

  /// True when the most recent evaluation hit a flagged failure (training
  /// divergence) and returned the worst-possible fitness instead.
  virtual bool last_diverged() const { return false; }
};

/// Analytic test function evaluated on the raw position coordinates.
class BenchmarkObjective final : public Objective {
 public:
  explicit BenchmarkObjective(std::string name) : name_(std::move(name)) {
    benchmark_eval(name_, {});  // validates the name up front
  }

  double evaluate(const Position& candidate, const SearchSpace&) override {
    return benchmark_eval(name_, candidate);
  }

  std::string_view name() const override { return name_; }

 private:
  std::string name_;
};

}  // namespace swarmtune
