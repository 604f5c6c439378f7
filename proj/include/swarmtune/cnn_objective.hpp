#pragma once

#include <cstdint>

#include "swarmtune/dataset.hpp"
#include "swarmtune/objective.hpp"

namespace swarmtune {

// Budget for one fitness evaluation. objective_seed is shared by every
// candidate within a run so fitness differences come from the hyperparameters
// rather than initialization luck.
struct CnnObjectiveConfig {
  std::size_t eval_epochs = 5;
  std::size_t batch_size = 32;
  std::uint64_t objective_seed = 7;
};

// Trains a model from the decoded candidate under the configured budget and
// scores it as 1 - test accuracy. A run that diverges to a non-finite loss
// scores the worst possible 1.0 (and reports it via diverged) so the search
// continues past pathological learning rates. Deterministic per candidate.
double cnn_fitness(const Position& candidate, const SearchSpace& space, const Dataset& dataset,
                   const CnnObjectiveConfig& config, bool* diverged = nullptr);

class CnnObjective final : public Objective {
 public:
  // Validates the dataset (>= 2 classes, nonempty train and test splits) and
  // the budget; failures throw ConfigError.
  CnnObjective(Dataset dataset, CnnObjectiveConfig config);

  double evaluate(const Position& candidate, const SearchSpace& space) override;
  std::string_view name() const override { return "cnn"; }
  bool last_diverged() const override { return last_diverged_; }

  const Dataset& dataset() const { return dataset_; }
  const CnnObjectiveConfig& config() const { return config_; }

 private:
  Dataset dataset_;
  CnnObjectiveConfig config_;
  bool last_diverged_ = false;
};

}  // namespace swarmtune
