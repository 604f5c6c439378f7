#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swarmtune/config.hpp"
#include "swarmtune/dataset.hpp"
#include "swarmtune/errors.hpp"
#include "swarmtune/experiment.hpp"
#include "swarmtune/trace.hpp"

namespace {

struct CommonOverrides {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  bool equal_budget = false;
  bool literal_spiral = false;
};

swarmtune::ExperimentConfig load_config(const std::string& path, const CommonOverrides& ov) {
  swarmtune::ExperimentConfig config = swarmtune::parse_config_file(path);
  if (ov.seed_given) config.seed = ov.seed;
  if (!ov.out_dir.empty()) config.output_dir = ov.out_dir;
  if (ov.equal_budget) config.equal_budget = true;
  if (ov.literal_spiral) config.woa.literal_spiral = true;
  swarmtune::finalize_config(config);
  return config;
}

void run_optimize(const std::string& config_path, const CommonOverrides& ov) {
  swarmtune::ExperimentConfig config = load_config(config_path, ov);
  swarmtune::run_experiment(config, std::cout);
}

void run_train(const std::string& config_path, const CommonOverrides& ov) {
  swarmtune::ExperimentConfig config = load_config(config_path, ov);
  swarmtune::run_training(config, std::cout);
}

void run_gen_data(const std::string& out_dir, std::size_t per_class, const std::string& size_str,
                  std::uint64_t seed) {
  const auto sep = size_str.find('x');
  int height = 0;
  int width = 0;
  try {
    std::size_t hlen = 0;
    std::size_t wlen = 0;
    height = std::stoi(size_str.substr(0, sep), &hlen);
    width = std::stoi(size_str.substr(sep + 1), &wlen);
    if (sep == std::string::npos || hlen != sep || wlen != size_str.size() - sep - 1) {
      throw std::invalid_argument("trailing characters");
    }
  } catch (const std::logic_error&) {
    throw swarmtune::ConfigError("--size expects HxW, got '" + size_str + "'");
  }
  swarmtune::Dataset data = swarmtune::generate_synthetic_dataset(per_class, height, width, seed);
  swarmtune::write_ppm_tree(data, out_dir);
  std::cout << "wrote " << data.size() << " images (" << data.num_classes() << " classes, "
            << height << "x" << width << ") to " << out_dir << "\n";
}

// Re-derives the best-so-far curve from the raw fitness column and emits it
// as plot-ready CSV on stdout; the human-readable summary goes to stderr so
// redirecting stdout captures clean data.
void run_report(const std::string& trace_path) {
  const std::vector<swarmtune::TraceRecord> trace = swarmtune::read_trace_csv(trace_path);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_eval = 0;
  std::size_t last_iteration = 0;
  std::cout << "evaluation,iteration,fitness,best_so_far\n";
  for (const auto& rec : trace) {
    if (rec.fitness < best) {
      best = rec.fitness;
      best_eval = rec.evaluation;
    }
    last_iteration = std::max(last_iteration, rec.iteration);
    std::cout << rec.evaluation << ',' << rec.iteration << ','
              << swarmtune::format_real(rec.fitness) << ',' << swarmtune::format_real(best)
              << "\n";
  }
  std::cerr << trace_path << ": " << trace.size() << " evaluations over " << last_iteration
            << " iterations\n";
  if (!trace.empty()) {
    const auto& hp = trace[best_eval].candidate;
    std::cerr << "best fitness " << swarmtune::format_real(best) << " at evaluation " << best_eval
              << "\n"
              << "best candidate: num_filters=" << hp.num_filters
              << " dense_units=" << hp.dense_units
              << " dropout_rate=" << swarmtune::format_real(hp.dropout_rate)
              << " learning_rate=" << swarmtune::format_real(hp.learning_rate) << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm-search hyperparameter tuning for a small CNN image classifier"};
  app.require_subcommand(1);

  CommonOverrides ov;
  std::string config_path;
  std::string out_dir;
  std::string trace_path;
  std::size_t per_class = 50;
  std::string size_str = "32x32";
  std::uint64_t gen_seed = 1234;

  auto* optimize = app.add_subcommand("optimize", "Run the configured hyperparameter search");
  optimize->add_option("config", config_path, "Experiment config file")->required();
  optimize->add_option("--seed", ov.seed, "Override the top-level seed")
      ->each([&ov](const std::string&) { ov.seed_given = true; });
  optimize->add_option("--out", ov.out_dir, "Override the output directory");
  optimize->add_flag("--equal-budget", ov.equal_budget,
                     "Raise the smaller algorithm's iteration count to match evaluation budgets");
  optimize->add_flag("--woa-literal-spiral", ov.literal_spiral,
                     "Make every whale take the spiral move each iteration");

  auto* train = app.add_subcommand("train", "Train and evaluate one fixed hyperparameter set");
  train->add_option("config", config_path, "Experiment config file")->required();
  train->add_option("--seed", ov.seed, "Override the top-level seed")
      ->each([&ov](const std::string&) { ov.seed_given = true; });
  train->add_option("--out", ov.out_dir, "Override the output directory");

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic PPM image tree");
  gen->add_option("out_dir", out_dir, "Directory to create the class folders in")->required();
  gen->add_option("--per-class", per_class, "Images per class")->capture_default_str();
  gen->add_option("--size", size_str, "Image size as HxW")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();

  auto* report = app.add_subcommand("report", "Recompute a trace's best-so-far curve as CSV");
  report->add_option("trace", trace_path, "Trace CSV written by optimize")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (optimize->parsed()) {
      run_optimize(config_path, ov);
    } else if (train->parsed()) {
      run_train(config_path, ov);
    } else if (gen->parsed()) {
      run_gen_data(out_dir, per_class, size_str, gen_seed);
    } else if (report->parsed()) {
      run_report(trace_path);
    }
  } catch (const swarmtune::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const swarmtune::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const swarmtune::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const swarmtune::EvaluationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
