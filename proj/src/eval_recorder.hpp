#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "swarmtune/objective.hpp"
#include "swarmtune/trace.hpp"

namespace swarmtune::detail {

// Maps decoded coordinates onto the four standard fields without a bounds
// or shape check. Exact for standard-shaped spaces; for other spaces the
// mapping is best-effort and only feeds the trace.
inline HyperParams trace_candidate(const SearchSpace& space, const Position& pos) {
  const auto values = space.decode_values(pos);
  HyperParams hp;
  if (values.size() > 0) hp.num_filters = static_cast<int>(std::llround(values[0]));
  if (values.size() > 1) hp.dense_units = static_cast<int>(std::llround(values[1]));
  if (values.size() > 2) hp.dropout_rate = values[2];
  if (values.size() > 3) hp.learning_rate = values[3];
  return hp;
}

// Funnels every objective evaluation through one place: clips nothing
// (callers pass in-bounds positions), tracks the running best with strict
// improvement, and appends one trace record per call.
struct EvalRecorder {
  const SearchSpace& space;
  Objective& objective;
  std::function<void(const TraceRecord&)> on_evaluation{};
  std::vector<TraceRecord> trace{};
  Position best_position{};
  double best_fitness = std::numeric_limits<double>::infinity();

  double evaluate(const Position& pos, std::size_t iteration) {
    double fitness;
    try {
      fitness = objective.evaluate(pos, space);
    } catch (const std::exception& e) {
      throw EvaluationError(e.what(), std::move(trace));
    }
    if (!std::isfinite(fitness)) {
      throw EvaluationError("objective returned a non-finite fitness", std::move(trace));
    }
    if (fitness < best_fitness) {
      best_fitness = fitness;
      best_position = pos;
    }
    TraceRecord rec;
    rec.evaluation = trace.size();
    rec.iteration = iteration;
    rec.candidate = trace_candidate(space, pos);
    rec.fitness = fitness;
    rec.best_so_far = best_fitness;
    rec.diverged = objective.last_diverged();
    trace.push_back(std::move(rec));
    if (on_evaluation) on_evaluation(trace.back());
    return fitness;
  }

  OptimizationResult finish() {
    OptimizationResult result;
    result.best_position = best_position;
    result.best_hyperparams = trace_candidate(space, best_position);
    result.best_fitness = best_fitness;
    result.evaluations = trace.size();
    result.trace = std::move(trace);
    return result;
  }
};

}  // namespace swarmtune::detail
