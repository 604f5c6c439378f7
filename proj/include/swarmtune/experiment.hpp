#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "swarmtune/config.hpp"
#include "swarmtune/dataset.hpp"
#include "swarmtune/metrics.hpp"
#include "swarmtune/trace.hpp"

namespace swarmtune {

struct AlgorithmOutcome {
  std::string name;  // "pso" or "woa"
  OptimizationResult result;
  bool has_metrics = false;  // true after the cnn-mode final retrain
  double final_accuracy = 0.0;
  ConfusionMatrix cm;
  ClassMetrics metrics;
};

struct ExperimentOutcome {
  std::filesystem::path output_dir;
  std::vector<AlgorithmOutcome> algorithms;
};

// Runs the configured search per selected algorithm and writes the artifact
// set into the output directory: trace_<alg>.csv and best_<alg>.txt always;
// metrics_<alg>.csv plus model_<alg>.tcnn after the cnn-mode retrain;
// comparison.csv when both algorithms ran. Timestamps are confined to
// run_info.txt so everything else is byte-identical across repeated runs.
// Progress and the metrics tables go to log. If an objective evaluation
// fails, the partial trace is flushed before the error propagates.
ExperimentOutcome run_experiment(const ExperimentConfig& config, std::ostream& log);

// The train subcommand: builds the dataset, trains config.hyperparams for
// final_epochs, and writes model.tcnn + metrics.csv into the output dir.
void run_training(const ExperimentConfig& config, std::ostream& log);

// Builds the dataset the objective settings describe (synthetic or a PPM
// directory tree).
Dataset build_dataset(const ObjectiveSettings& settings);

}  // namespace swarmtune
