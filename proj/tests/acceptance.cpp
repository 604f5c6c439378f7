// Acceptance gate: one check per release criterion, each reported as a
// single [PASS]/[FAIL] line with its runtime. Exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "swarmtune/benchmarks.hpp"
#include "swarmtune/cnn.hpp"
#include "swarmtune/config.hpp"
#include "swarmtune/dataset.hpp"
#include "swarmtune/errors.hpp"
#include "swarmtune/experiment.hpp"
#include "swarmtune/metrics.hpp"
#include "swarmtune/objective.hpp"
#include "swarmtune/ppm.hpp"
#include "swarmtune/pso.hpp"
#include "swarmtune/rng.hpp"
#include "swarmtune/search_space.hpp"
#include "swarmtune/trace.hpp"
#include "swarmtune/woa.hpp"

using namespace swarmtune;

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

void require_close(double actual, double expected, double tol, const std::string& what) {
  if (!(std::fabs(actual - expected) <= tol)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": got " << actual << ", want " << expected << " within " << tol;
    throw std::runtime_error(msg.str());
  }
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SearchSpace box4(double lo, double hi) {
  return SearchSpace(std::vector<ParamSpec>{
      {"x0", ParamKind::Continuous, lo, hi},
      {"x1", ParamKind::Continuous, lo, hi},
      {"x2", ParamKind::Continuous, lo, hi},
      {"x3", ParamKind::Continuous, lo, hi},
  });
}

// --- criterion 1 ------------------------------------------------------

void check_hand_examples() {
  const double tol = 1e-12;

  const auto v = pso_velocity_update({2.0}, {0.0}, {4.0}, {8.0}, 0.5, 1.0, 1.0, 0.5, 0.5);
  require_close(v[0], 7.0, tol, "velocity update");
  const auto v_inertia =
      pso_velocity_update({2.0}, {0.0}, {4.0}, {8.0}, 0.5, 1.0, 1.0, 0.0, 0.0);
  require_close(v_inertia[0], 1.0, tol, "velocity update with zero r");
  const auto v_settled =
      pso_velocity_update({0.0}, {3.0}, {3.0}, {3.0}, 0.9, 1.5, 1.5, 0.7, 0.2);
  require_close(v_settled[0], 0.0, tol, "settled velocity");

  require_close(woa_encircle({5.0}, {3.0}, 0.5, 1.0)[0], 4.0, tol, "encircle");
  require(woa_encircle({5.0}, {3.0}, 0.0, 1.0)[0] == 5.0, "encircle with A=0 must be exact");
  require_close(woa_spiral({3.0}, {5.0}, 0.0, 1.0)[0], 7.0, tol, "spiral at l=0");

  require_close(woa_coefficients(2.0, 1.0, 0.5, 0.0, 0.0).A, 2.0, tol, "A at r1=1, a=2");
  for (double a : {2.0, 1.0, 0.25}) {
    require_close(woa_coefficients(a, 0.5, 0.5, 0.0, 0.0).A, 0.0, tol, "A at r1=1/2");
  }
  for (std::size_t t : {std::size_t{1}, std::size_t{5}, std::size_t{7}, std::size_t{100}}) {
    require(woa_linear_a(0, t) == 2.0, "shrink schedule must start at exactly 2");
    require(woa_linear_a(t, t) == 0.0, "shrink schedule must end at exactly 0");
  }

  const double s = benchmark_eval("sphere", std::vector<double>{1.0, 2.0});
  require_close(s, 5.0, tol, "sphere(1,2)");
  require_close(benchmark_eval("rastrigin", std::vector<double>{0.0, 0.0, 0.0, 0.0}), 0.0, tol,
                "rastrigin at origin");
  require_close(benchmark_eval("rosenbrock", std::vector<double>{1.0, 1.0}), 0.0, tol,
                "rosenbrock at (1,1)");

  const SearchSpace space = SearchSpace::standard();
  const HyperParams row1 = space.decode({8.0, 51.0, 0.3321050934710237, 0.009392635740413055});
  require(row1.num_filters == 8 && row1.dense_units == 51, "decode of first reference row");
  require(row1.dropout_rate == 0.3321050934710237, "dropout must decode unchanged");
  require(row1.learning_rate == 0.009392635740413055, "learning rate must decode unchanged");
  const HyperParams row2 = space.decode({9.4, 88.0, 0.13298126723690565, 0.005372761052242158});
  require(row2.num_filters == 9 && row2.dense_units == 88, "decode of second reference row");
  const HyperParams top = space.decode({32.0, 128.0, 0.5, 0.01});
  require(top.num_filters == 32 && top.dense_units == 128 && top.dropout_rate == 0.5 &&
              top.learning_rate == 0.01,
          "upper bounds must decode to themselves");

  const SearchSpace point(std::vector<ParamSpec>{{"n", ParamKind::Integer, 5.0, 5.0}});
  Rng rng(1);
  require(point.sample(rng)[0] == 5.0, "degenerate integer range must sample its only point");

  Rng model_rng(3);
  CnnModel model = build_model(2, 3, 0.0, 4, 4, 1, 4, model_rng);
  for (Tensor* t : parameter_tensors(model)) t->fill(0.0);
  Tensor batch({2, 4, 4, 1});
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = 0.1 * static_cast<double>(i % 7);
  const Tensor probs = forward(model, batch);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    require(probs[i] == 0.25, "zero-weight model must emit exactly uniform probabilities");
  }
  CnnGrads grads = make_grads_like(model);
  const double loss = loss_and_grads(model, batch, {0, 3}, false, nullptr, grads);
  require_close(loss, 1.3862943611198906, tol, "uniform-probability loss (ln 4)");

  require_close(f1_score(0.94, 0.83), 2.0 * 0.94 * 0.83 / (0.94 + 0.83), tol, "f1(0.94, 0.83)");
}

// --- criterion 2 ------------------------------------------------------

void check_gradients() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024);
  CnnModel model = build_model(2, 3, 0.0, 8, 8, 1, 4, rng);
  Tensor batch({4, 8, 8, 1});
  for (std::size_t i = 0; i < batch.size(); ++i) batch[i] = rng.uniform();
  const std::vector<int> labels{0, 3, 1, 2};

  CnnGrads grads = make_grads_like(model);
  loss_and_grads(model, batch, labels, false, nullptr, grads);

  const auto loss_of = [&](const CnnModel& m) {
    const Tensor probs = forward(m, batch);
    double sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      sum += -std::log(probs[i * 4 + labels[i]]);
    }
    return sum / static_cast<double>(labels.size());
  };

  const auto params = parameter_tensors(model);
  const auto grad_tensors = parameter_tensors(grads);
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t i = 0; i < params[t]->size(); ++i) {
      const double fd = oracles::central_difference(model, *params[t], i, 1e-5, loss_of);
      worst = std::max(worst, oracles::relative_error((*grad_tensors[t])[i], fd));
      ++checked;
    }
  }
  require(checked > 100, "gradient check covered too few parameters");
  require(worst < 1e-4,
          "worst finite-difference relative error " + std::to_string(worst) + " exceeds 1e-4");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 10.0, "gradient check took " + std::to_string(secs) + " s, limit 10");
}

// --- criterion 3 ------------------------------------------------------

void check_benchmark_convergence() {
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> pso_bests, woa_bests, rs_sphere, rs_rastrigin;
  std::size_t pso_hits = 0;
  for (unsigned seed = 1; seed <= 20; ++seed) {
    BenchmarkObjective sphere("sphere");
    PsoConfig pso;
    pso.swarm_size = 20;
    pso.iterations = 100;
    pso.seed = seed;
    const OptimizationResult p = pso_run(box4(-5.0, 5.0), sphere, pso);
    pso_bests.push_back(p.best_fitness);
    if (p.best_fitness < 1e-3) ++pso_hits;
    rs_sphere.push_back(oracles::random_search_best(oracles::sphere, std::vector<double>(4, -5.0),
                                                    std::vector<double>(4, 5.0), p.evaluations,
                                                    seed));

    BenchmarkObjective rastrigin("rastrigin");
    WoaConfig woa;
    woa.population_size = 20;
    woa.iterations = 200;
    woa.seed = seed;
    const OptimizationResult w = woa_run(box4(-5.12, 5.12), rastrigin, woa);
    woa_bests.push_back(w.best_fitness);
    rs_rastrigin.push_back(
        oracles::random_search_best(oracles::rastrigin, std::vector<double>(4, -5.12),
                                    std::vector<double>(4, 5.12), w.evaluations, seed));
  }

  require(pso_hits >= 19, "sphere runs below 1e-3: " + std::to_string(pso_hits) + "/20, need 19");
  const double woa_median = median(woa_bests);
  require(woa_median < 1.0,
          "median rastrigin best " + std::to_string(woa_median) + " not below 1.0");
  require(median(pso_bests) < median(rs_sphere),
          "swarm search failed to beat equal-budget random search on the sphere");
  require(woa_median < median(rs_rastrigin),
          "whale search failed to beat equal-budget random search on rastrigin");

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 30.0, "benchmark runs took " + std::to_string(secs) + " s, limit 30");
}

// --- criterion 4 ------------------------------------------------------

std::size_t csv_data_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t rows = 0;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (!line.empty()) ++rows;
  }
  return rows;
}

void check_budgets() {
  BenchmarkObjective sphere("sphere");
  const SearchSpace space = SearchSpace::standard();

  PsoConfig pso;  // stock 5 particles, 5 iterations
  pso.seed = 4;
  const OptimizationResult p = pso_run(space, sphere, pso);
  require(p.evaluations == 30, "stock swarm budget must be exactly 30 evaluations");
  std::ostringstream pso_csv;
  write_trace_csv(pso_csv, p.trace);
  require(csv_data_rows(pso_csv.str()) == 30, "swarm trace must hold exactly 30 rows");

  WoaConfig woa;  // stock 5 whales, 10 iterations
  woa.seed = 4;
  const OptimizationResult w = woa_run(space, sphere, woa);
  require(w.evaluations == 55, "stock whale budget must be exactly 55 evaluations");
  std::ostringstream woa_csv;
  write_trace_csv(woa_csv, w.trace);
  require(csv_data_rows(woa_csv.str()) == 55, "whale trace must hold exactly 55 rows");
}

// --- criterion 5 ------------------------------------------------------

void check_trace_invariants() {
  std::mt19937_64 gen(999);
  const auto pick = [&](double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(gen);
  };
  const auto pick_int = [&](int lo, int hi) {
    return static_cast<int>(std::uniform_int_distribution<int>(lo, hi)(gen));
  };

  for (int round = 0; round < 100; ++round) {
    const int nf_lo = pick_int(2, 8), nf_hi = nf_lo + pick_int(1, 24);
    const int du_lo = pick_int(8, 32), du_hi = du_lo + pick_int(4, 64);
    const double dr_lo = pick(0.0, 0.3), dr_hi = dr_lo + pick(0.05, 0.35);
    const double lr_lo = pick(1e-4, 1e-3), lr_hi = lr_lo * pick(2.0, 20.0);
    const SearchSpace space(std::vector<ParamSpec>{
        {"num_filters", ParamKind::Integer, double(nf_lo), double(nf_hi)},
        {"dense_units", ParamKind::Integer, double(du_lo), double(du_hi)},
        {"dropout_rate", ParamKind::Continuous, dr_lo, dr_hi},
        {"learning_rate", ParamKind::Continuous, lr_lo, lr_hi},
    });

    BenchmarkObjective sphere("sphere");
    OptimizationResult result;
    if (round % 2 == 0) {
      PsoConfig config;
      config.swarm_size = static_cast<std::size_t>(pick_int(2, 8));
      config.iterations = static_cast<std::size_t>(pick_int(2, 10));
      config.seed = gen();
      result = pso_run(space, sphere, config);
    } else {
      WoaConfig config;
      config.population_size = static_cast<std::size_t>(pick_int(2, 8));
      config.iterations = static_cast<std::size_t>(pick_int(2, 10));
      config.seed = gen();
      result = woa_run(space, sphere, config);
    }

    double running = std::numeric_limits<double>::infinity();
    for (const TraceRecord& rec : result.trace) {
      running = std::min(running, rec.fitness);
      require(rec.best_so_far == running, "best-so-far must be the running minimum");
      const HyperParams& c = rec.candidate;
      require(c.num_filters >= nf_lo && c.num_filters <= nf_hi,
              "num_filters decoded outside its range");
      require(c.dense_units >= du_lo && c.dense_units <= du_hi,
              "dense_units decoded outside its range");
      require(c.dropout_rate >= dr_lo && c.dropout_rate <= dr_hi,
              "dropout_rate decoded outside its range");
      require(c.learning_rate >= lr_lo && c.learning_rate <= lr_hi,
              "learning_rate decoded outside its range");
    }
    require(result.best_fitness == running, "final best must equal the trace minimum");
  }
}

// --- criterion 6 ------------------------------------------------------

void compare_artifacts(const std::filesystem::path& a, const std::filesystem::path& b,
                       const std::vector<std::string>& names) {
  for (const std::string& name : names) {
    require(read_file_bytes(a / name) == read_file_bytes(b / name),
            name + " differs between identical runs");
  }
}

void check_repeatability() {
  const char* benchmark_text =
      "algorithm = both\n"
      "seed = 5\n"
      "[pso]\n"
      "swarm_size = 3\n"
      "iterations = 4\n"
      "[woa]\n"
      "population_size = 3\n"
      "iterations = 4\n"
      "[objective]\n"
      "type = sphere\n";
  const char* cnn_text =
      "algorithm = both\n"
      "seed = 9\n"
      "[pso]\n"
      "swarm_size = 2\n"
      "iterations = 2\n"
      "[woa]\n"
      "population_size = 2\n"
      "iterations = 2\n"
      "[objective]\n"
      "type = cnn\n"
      "dataset = synthetic\n"
      "per_class = 6\n"
      "image_size = 16x16\n"
      "eval_epochs = 2\n"
      "batch_size = 16\n"
      "final_epochs = 2\n";

  const struct {
    const char* text;
    const char* tag;
    std::vector<std::string> files;
  } cases[] = {
      {benchmark_text, "bench", {"trace_pso.csv", "trace_woa.csv", "best_pso.txt", "best_woa.txt"}},
      {cnn_text,
       "cnn",
       {"trace_pso.csv", "trace_woa.csv", "best_pso.txt", "best_woa.txt", "metrics_pso.csv",
        "metrics_woa.csv", "model_pso.tcnn", "model_woa.tcnn", "comparison.csv"}},
  };
  for (const auto& c : cases) {
    std::filesystem::path dirs[2];
    for (int run = 0; run < 2; ++run) {
      ExperimentConfig config = parse_config_text(c.text, "repeatability.conf");
      dirs[run] = fresh_dir(std::string("swarmtune_rep_") + c.tag + std::to_string(run));
      config.output_dir = dirs[run].string();
      finalize_config(config);
      std::ostringstream log;
      run_experiment(config, log);
    }
    compare_artifacts(dirs[0], dirs[1], c.files);
    std::filesystem::remove_all(dirs[0]);
    std::filesystem::remove_all(dirs[1]);
  }
}

// --- criterion 7 ------------------------------------------------------

void check_end_to_end() {
  const auto start = std::chrono::steady_clock::now();

  ExperimentConfig config;
  config.algorithm = "both";
  config.seed = 42;
  config.objective.type = "cnn";
  config.objective.dataset = "synthetic";
  config.objective.per_class = 50;
  config.objective.image_height = 32;
  config.objective.image_width = 32;
  config.objective.eval_epochs = 5;
  config.objective.final_epochs = 5;
  config.objective.batch_size = 32;
  const auto out_dir = fresh_dir("swarmtune_end_to_end");
  config.output_dir = out_dir.string();
  finalize_config(config);

  std::ostringstream log;
  const ExperimentOutcome outcome = run_experiment(config, log);
  require(outcome.algorithms.size() == 2, "both algorithms must run");

  const Dataset data = build_dataset(config.objective);
  const SearchSpace space = config_space(config);
  for (const AlgorithmOutcome& alg : outcome.algorithms) {
    const HyperParams hp = space.decode(space.clip(alg.result.best_position));
    std::size_t good = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const TrainResult trained =
          train(hp, data, config.objective.final_epochs, config.objective.batch_size, seed);
      if (evaluate_model(trained.model, data).accuracy >= 0.90) ++good;
    }
    require(good >= 3, alg.name + " winner reached 0.90 accuracy on only " +
                           std::to_string(good) + "/5 retrain seeds");
  }

  const std::string comparison = read_file_bytes(out_dir / "comparison.csv");
  require(comparison.rfind("quantity,woa,pso", 0) == 0,
          "comparison report must tabulate quantity,woa,pso");
  for (const char* row : {"num_filters,", "dense_units,", "dropout_rate,", "learning_rate,",
                          "best_fitness,", "evaluations,", "final_accuracy,"}) {
    require(comparison.find(std::string("\n") + row) != std::string::npos,
            std::string("comparison report is missing the ") + row + " row");
  }
  std::filesystem::remove_all(out_dir);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  require(secs < 900.0, "end-to-end run took " + std::to_string(secs) + " s, limit 900");
}

// --- criterion 8 ------------------------------------------------------

void check_metrics_oracle() {
  std::mt19937_64 gen(77);
  for (int round = 0; round < 1000; ++round) {
    const int k = std::uniform_int_distribution<int>(2, 6)(gen);
    const int n = std::uniform_int_distribution<int>(k, 60)(gen);
    std::uniform_int_distribution<int> label(0, k - 1);
    std::vector<int> truth(n), pred(n);
    for (int i = 0; i < n; ++i) {
      truth[i] = label(gen);
      pred[i] = label(gen);
    }
    const ConfusionMatrix cm = confusion_matrix(truth, pred, static_cast<std::size_t>(k));
    const ClassMetrics metrics = class_metrics(cm);
    const auto expected = oracles::metrics_by_counting(truth, pred, k);
    for (int c = 0; c < k; ++c) {
      require_close(metrics.per_class[c].precision, expected[c].precision, 1e-12, "precision");
      require_close(metrics.per_class[c].recall, expected[c].recall, 1e-12, "recall");
      require_close(metrics.per_class[c].f1, expected[c].f1, 1e-12, "f1");
    }
    require_close(metrics.accuracy, oracles::accuracy_by_counting(truth, pred), 1e-12,
                  "accuracy");
  }

  const double f1 = f1_score(0.94, 0.83);
  require(std::round(f1 * 100.0) / 100.0 == 0.88, "f1(0.94, 0.83) must round to 0.88");
}

// --- criterion 9 ------------------------------------------------------

void check_image_decoding() {
  const auto root = fresh_dir("swarmtune_pixel_probe");
  std::filesystem::create_directories(root / "blue");
  std::filesystem::create_directories(root / "red");
  {
    std::ofstream red(root / "red" / "p.ppm", std::ios::binary);
    red << "P6\n1 1\n255\n";
    red.put('\xff');
    red.put('\x00');
    red.put('\x00');
  }
  {
    std::ofstream blue(root / "blue" / "p.ppm", std::ios::binary);
    blue << "P6\n1 1\n255\n";
    blue.put('\x00');
    blue.put('\x00');
    blue.put('\xff');
  }

  const Dataset data = load_dataset(root, 1, 1);
  std::filesystem::remove_all(root);
  require(data.size() == 2, "probe dataset must hold two images");
  std::size_t red_index = data.class_names.size();
  for (std::size_t c = 0; c < data.class_names.size(); ++c) {
    if (data.class_names[c] == "red") red_index = c;
  }
  require(red_index < data.class_names.size(), "class named by its directory");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != static_cast<int>(red_index)) continue;
    require(data.images[i * 3 + 0] == 1.0, "pure red must decode its red channel to exactly 1");
    require(data.images[i * 3 + 1] == 0.0, "pure red must decode its green channel to exactly 0");
    require(data.images[i * 3 + 2] == 0.0, "pure red must decode its blue channel to exactly 0");
  }

  bool threw = false;
  try {
    std::istringstream bad_magic(std::string("P5\n1 1\n255\n") + std::string(3, 'x'));
    read_ppm(bad_magic, "probe.pgm");
  } catch (const ParseError& e) {
    threw = true;
    require(std::string(e.what()).find("probe.pgm") != std::string::npos,
            "magic failure must name its source");
  }
  require(threw, "a non-P6 magic must raise a parse error");

  threw = false;
  try {
    std::istringstream cut(std::string("P6\n2 2\n255\n") + std::string(7, 'x'));
    read_ppm(cut, "cut.ppm");
  } catch (const ParseError& e) {
    threw = true;
    require(std::string(e.what()).find("truncated") != std::string::npos,
            "truncation must be called out as such");
  }
  require(threw, "truncated pixel data must raise a parse error");
}

}  // namespace

int main() {
  const struct {
    const char* name;
    std::function<void()> run;
  } criteria[] = {
      {"closed-form update rules match hand-worked examples", check_hand_examples},
      {"analytic gradients agree with finite differences", check_gradients},
      {"searches converge on benchmarks and beat random search", check_benchmark_convergence},
      {"evaluation budgets are exact", check_budgets},
      {"best-so-far is monotone and candidates stay in range", check_trace_invariants},
      {"repeated runs produce byte-identical artifacts", check_repeatability},
      {"end-to-end tuning recovers accurate models", check_end_to_end},
      {"classification metrics match a counting oracle", check_metrics_oracle},
      {"image decoding is exact and failures are named", check_image_decoding},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criterion.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    if (error.empty()) {
      line << "[PASS] " << criterion.name << " (" << secs << " s)";
    } else {
      ++failures;
      line << "[FAIL] " << criterion.name << ": " << error << " (" << secs << " s)";
    }
    std::cout << line.str() << std::endl;
  }
  if (failures > 0) {
    std::cout << failures << " of 9 criteria failed" << std::endl;
    return 1;
  }
  std::cout << "all 9 criteria passed" << std::endl;
  return 0;
}
