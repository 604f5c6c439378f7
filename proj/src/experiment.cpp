#include "swarmtune/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>

#include "swarmtune/cnn.hpp"
#include "swarmtune/cnn_objective.hpp"
#include "swarmtune/errors.hpp"
#include "swarmtune/pso.hpp"
#include "swarmtune/woa.hpp"

namespace swarmtune {

namespace {

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ofstream open_artifact(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  return out;
}

std::string format_param_value(const ParamSpec& spec, double value) {
  if (spec.kind == ParamKind::Integer) return std::to_string(std::llround(value));
  return format_real(value);
}

void write_best_file(const std::filesystem::path& path, const SearchSpace& space,
                     const Position& best) {
  auto out = open_artifact(path);
  const auto values = space.decode_values(best);
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.param(i).name << " = " << format_param_value(space.param(i), values[i]) << '\n';
  }
}

void write_comparison_csv(const std::filesystem::path& path, const SearchSpace& space,
                          const std::vector<AlgorithmOutcome>& algorithms) {
  auto out = open_artifact(path);
  out << "quantity";
  for (const auto& alg : algorithms) out << ',' << alg.name;
  out << '\n';

  std::vector<std::vector<double>> decoded;
  for (const auto& alg : algorithms) decoded.push_back(space.decode_values(alg.result.best_position));
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << space.param(i).name;
    for (const auto& values : decoded) out << ',' << format_param_value(space.param(i), values[i]);
    out << '\n';
  }

  out << "best_fitness";
  for (const auto& alg : algorithms) out << ',' << format_real(alg.result.best_fitness);
  out << '\n';
  out << "evaluations";
  for (const auto& alg : algorithms) out << ',' << alg.result.evaluations;
  out << '\n';

  const bool all_metrics = std::all_of(algorithms.begin(), algorithms.end(),
                                       [](const AlgorithmOutcome& a) { return a.has_metrics; });
  if (!all_metrics) return;

  out << "final_accuracy";
  for (const auto& alg : algorithms) out << ',' << format_real(alg.final_accuracy);
  out << '\n';
  const auto& names = algorithms.front().cm.class_names;
  for (std::size_t c = 0; c < names.size(); ++c) {
    out << names[c] << "_precision";
    for (const auto& alg : algorithms) out << ',' << format_real(alg.metrics.per_class[c].precision);
    out << '\n';
    out << names[c] << "_recall";
    for (const auto& alg : algorithms) out << ',' << format_real(alg.metrics.per_class[c].recall);
    out << '\n';
    out << names[c] << "_f1";
    for (const auto& alg : algorithms) out << ',' << format_real(alg.metrics.per_class[c].f1);
    out << '\n';
  }
}

std::vector<int> test_truth(const Dataset& dataset) {
  std::vector<int> truth;
  truth.reserve(dataset.test_indices.size());
  for (std::size_t i : dataset.test_indices) truth.push_back(dataset.labels[i]);
  return truth;
}

// Retrains the winning candidate at the reporting budget and derives the
// Table-style evaluation artifacts from the resulting model.
void attach_final_metrics(AlgorithmOutcome& alg, const SearchSpace& space, const Dataset& dataset,
                          const ObjectiveSettings& settings,
                          const std::filesystem::path& out_dir, std::ostream& log) {
  const HyperParams best = space.decode(space.clip(alg.result.best_position));
  const TrainResult retrained =
      train(best, dataset, settings.final_epochs, settings.batch_size, settings.objective_seed);
  const EvalResult eval = evaluate_model(retrained.model, dataset);
  alg.cm = confusion_matrix(test_truth(dataset), eval.predictions, dataset.num_classes(),
                            dataset.class_names);
  alg.metrics = class_metrics(alg.cm);
  alg.final_accuracy = eval.accuracy;
  alg.has_metrics = true;

  {
    auto out = open_artifact(out_dir / ("metrics_" + alg.name + ".csv"));
    write_metrics_csv(out, alg.cm, alg.metrics);
  }
  save_model(retrained.model, out_dir / ("model_" + alg.name + ".tcnn"));
  print_metrics_table(log, "Evaluation metrics (" + alg.name + "), best candidate retrained:",
                      alg.cm, alg.metrics);
}

}  // namespace

Dataset build_dataset(const ObjectiveSettings& settings) {
  if (settings.dataset == "synthetic") {
    return generate_synthetic_dataset(settings.per_class, settings.image_height,
                                      settings.image_width, settings.dataset_seed);
  }
  return load_dataset(settings.dataset, settings.image_height, settings.image_width);
}

ExperimentOutcome run_experiment(const ExperimentConfig& config, std::ostream& log) {
  const SearchSpace space = config_space(config);
  const bool is_cnn = config.objective.type == "cnn";
  const auto wall_start = std::chrono::steady_clock::now();
  const std::string started = timestamp_utc();

  ExperimentOutcome outcome;
  outcome.output_dir = config.output_dir;
  std::filesystem::create_directories(outcome.output_dir);

  std::optional<Dataset> dataset;
  std::unique_ptr<Objective> objective;
  if (is_cnn) {
    dataset = build_dataset(config.objective);
    log << "dataset: " << dataset->size() << " images (" << dataset->num_classes() << " classes), "
        << dataset->train_indices.size() << " train / " << dataset->test_indices.size()
        << " test, " << dataset->height() << "x" << dataset->width() << "\n";
    objective = std::make_unique<CnnObjective>(
        *dataset, CnnObjectiveConfig{config.objective.eval_epochs, config.objective.batch_size,
                                     config.objective.objective_seed});
  } else {
    objective = std::make_unique<BenchmarkObjective>(config.objective.type);
  }

  std::vector<std::string> algorithms;
  if (config.algorithm == "both") {
    algorithms = {"woa", "pso"};
  } else {
    algorithms = {config.algorithm};
  }

  for (const auto& name : algorithms) {
    const std::size_t budget = name == "pso"
                                   ? config.pso.swarm_size * (1 + config.pso.iterations)
                                   : config.woa.population_size * (1 + config.woa.iterations);
    log << "[" << name << "] optimizing " << objective->name() << ", budget " << budget
        << " evaluations\n";

    // Per-evaluation progress is worth the noise only when single
    // evaluations are slow, i.e. when each one trains a model.
    std::function<void(const TraceRecord&)> progress;
    if (is_cnn) {
      progress = [&log, &name, budget](const TraceRecord& rec) {
        log << "[" << name << "] eval " << (rec.evaluation + 1) << "/" << budget << " iter "
            << rec.iteration << " fitness " << std::fixed << std::setprecision(4) << rec.fitness
            << " best " << rec.best_so_far << std::defaultfloat
            << (rec.diverged ? " (diverged)" : "") << "\n";
      };
    }

    AlgorithmOutcome alg;
    alg.name = name;
    const auto trace_path = outcome.output_dir / ("trace_" + name + ".csv");
    try {
      if (name == "pso") {
        PsoConfig pso = config.pso;
        pso.on_evaluation = progress;
        alg.result = pso_run(space, *objective, pso);
      } else {
        WoaConfig woa = config.woa;
        woa.on_evaluation = progress;
        alg.result = woa_run(space, *objective, woa);
      }
    } catch (const EvaluationError& e) {
      write_trace_csv(trace_path, e.partial_trace());
      log << "[" << name << "] aborted after " << e.partial_trace().size()
          << " evaluations; partial trace preserved\n";
      throw;
    }

    write_trace_csv(trace_path, alg.result.trace);
    write_best_file(outcome.output_dir / ("best_" + name + ".txt"), space,
                    alg.result.best_position);
    log << "[" << name << "] best fitness " << format_real(alg.result.best_fitness) << " after "
        << alg.result.evaluations << " evaluations\n";

    if (is_cnn) {
      attach_final_metrics(alg, space, *dataset, config.objective, outcome.output_dir, log);
    }
    outcome.algorithms.push_back(std::move(alg));
  }

  if (outcome.algorithms.size() > 1) {
    write_comparison_csv(outcome.output_dir / "comparison.csv", space, outcome.algorithms);
  }

  {
    const auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start);
    auto info = open_artifact(outcome.output_dir / "run_info.txt");
    info << "started = " << started << '\n';
    info << "finished = " << timestamp_utc() << '\n';
    info << "duration_seconds = " << std::fixed << std::setprecision(1) << seconds.count() << '\n';
    info << "algorithm = " << config.algorithm << '\n';
    info << "objective = " << config.objective.type << '\n';
    info << "seed = " << config.seed << '\n';
    for (const auto& alg : outcome.algorithms) {
      info << alg.name << "_evaluations = " << alg.result.evaluations << '\n';
    }
  }
  return outcome;
}

void run_training(const ExperimentConfig& config, std::ostream& log) {
  if (config.objective.type != "cnn") {
    throw ConfigError("train needs objective type cnn, not " + config.objective.type);
  }
  Dataset dataset = build_dataset(config.objective);
  log << "dataset: " << dataset.size() << " images (" << dataset.num_classes() << " classes), "
      << dataset.train_indices.size() << " train / " << dataset.test_indices.size() << " test\n";

  const HyperParams& hp = config.hyperparams;
  log << "training num_filters=" << hp.num_filters << " dense_units=" << hp.dense_units
      << " dropout_rate=" << format_real(hp.dropout_rate)
      << " learning_rate=" << format_real(hp.learning_rate) << " for "
      << config.objective.final_epochs << " epochs\n";

  const TrainResult result = train(hp, dataset, config.objective.final_epochs,
                                   config.objective.batch_size, config.objective.objective_seed);
  for (std::size_t e = 0; e < result.history.size(); ++e) {
    log << "epoch " << (e + 1) << "/" << result.history.size() << " loss " << std::fixed
        << std::setprecision(4) << result.history[e].loss << " train accuracy "
        << result.history[e].accuracy << std::defaultfloat << "\n";
  }

  const EvalResult eval = evaluate_model(result.model, dataset);
  const ConfusionMatrix cm = confusion_matrix(test_truth(dataset), eval.predictions,
                                              dataset.num_classes(), dataset.class_names);
  const ClassMetrics metrics = class_metrics(cm);

  std::filesystem::path out_dir(config.output_dir);
  std::filesystem::create_directories(out_dir);
  {
    auto out = open_artifact(out_dir / "metrics.csv");
    write_metrics_csv(out, cm, metrics);
  }
  save_model(result.model, out_dir / "model.tcnn");
  print_metrics_table(log, "Evaluation metrics, trained model:", cm, metrics);
}

}  // namespace swarmtune
