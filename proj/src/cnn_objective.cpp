#include "swarmtune/cnn_objective.hpp"

#include <utility>

#include "swarmtune/cnn.hpp"
#include "swarmtune/errors.hpp"

namespace swarmtune {

double cnn_fitness(const Position& candidate, const SearchSpace& space, const Dataset& dataset,
                   const CnnObjectiveConfig& config, bool* diverged) {
  if (diverged != nullptr) *diverged = false;
  // Optimizers clip before evaluating, but clipping here too keeps the
  // fitness well-defined for raw out-of-range positions.
  const HyperParams hp = space.decode(space.clip(candidate));
  try {
    const TrainResult trained =
        train(hp, dataset, config.eval_epochs, config.batch_size, config.objective_seed);
    return 1.0 - evaluate_model(trained.model, dataset).accuracy;
  } catch (const DivergenceError&) {
    if (diverged != nullptr) *diverged = true;
    return 1.0;
  }
}

CnnObjective::CnnObjective(Dataset dataset, CnnObjectiveConfig config)
    : dataset_(std::move(dataset)), config_(config) {
  if (config_.eval_epochs < 1) throw ConfigError("cnn objective: eval_epochs must be >= 1");
  if (config_.batch_size < 1) throw ConfigError("cnn objective: batch_size must be >= 1");
  validate_dataset(dataset_);
  if (dataset_.num_classes() < 2) throw ConfigError("cnn objective: dataset needs >= 2 classes");
  if (dataset_.train_indices.empty() || dataset_.test_indices.empty()) {
    throw ConfigError("cnn objective: dataset needs nonempty train and test splits");
  }
}

double CnnObjective::evaluate(const Position& candidate, const SearchSpace& space) {
  return cnn_fitness(candidate, space, dataset_, config_, &last_diverged_);
}

}  // namespace swarmtune
