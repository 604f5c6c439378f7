#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "swarmtune/pso.hpp"
#include "swarmtune/search_space.hpp"
#include "swarmtune/woa.hpp"

namespace swarmtune {

// Objective selection and its knobs. For type=cnn, dataset is either the
// literal "synthetic" (procedural data from dataset_seed) or a directory of
// class-labelled PPM images.
struct ObjectiveSettings {
  std::string type = "cnn";  // sphere | rastrigin | rosenbrock | cnn
  std::string dataset = "synthetic";
  std::size_t per_class = 50;
  int image_height = 32;
  int image_width = 32;
  std::uint64_t dataset_seed = 1234;
  std::size_t eval_epochs = 5;
  std::size_t batch_size = 32;
  std::size_t final_epochs = 5;
  std::uint64_t objective_seed = 7;
};

// Parsed experiment file plus the few run-wide switches the CLI may override.
// Per-algorithm seeds left unset in the file are derived from the run seed
// during finalize_config.
struct ExperimentConfig {
  std::string algorithm = "both";  // pso | woa | both
  std::uint64_t seed = 42;
  bool equal_budget = false;
  std::vector<ParamSpec> space_params;  // defaults to SearchSpace::standard()
  PsoConfig pso;
  bool pso_seed_set = false;
  WoaConfig woa;
  bool woa_seed_set = false;
  ObjectiveSettings objective;
  std::string output_dir = "out";
  HyperParams hyperparams{20, 80, 0.3, 0.00505};  // for the train subcommand

  ExperimentConfig();
};

// Line-oriented `key = value` format with [section] headers. Sections:
// search_space.<param>, pso, woa, objective, output, hyperparams; keys before
// any header configure the run itself (algorithm, seed, equal_budget). '#'
// and ';' start comments. Unknown sections or keys are hard errors carrying
// the source name and line number.
ExperimentConfig parse_config_text(std::string_view text, const std::string& source_name);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Fills derived fields and cross-validates: per-algorithm seeds from the run
// seed, the equal-budget rewrite, bound sanity for the cnn objective, and
// search-space construction. Throws ConfigError naming the offending field.
void finalize_config(ExperimentConfig& config);

// The search space the config describes (valid after finalize_config).
SearchSpace config_space(const ExperimentConfig& config);

}  // namespace swarmtune
