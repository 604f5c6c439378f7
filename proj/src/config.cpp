#include "swarmtune/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "swarmtune/errors.hpp"
#include "swarmtune/rng.hpp"

namespace swarmtune {

namespace {

// Stream tags for deriving per-algorithm seeds from the run seed.
constexpr std::uint64_t kPsoSeedStream = 1;
constexpr std::uint64_t kWoaSeedStream = 2;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct ParseCursor {
  const std::string& source;
  int line = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(source + ":" + std::to_string(line) + ": " + what);
  }
};

double parse_real(std::string_view value, const ParseCursor& at, const std::string& key) {
  const std::string text(value);
  char* end = nullptr;
  const double parsed = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || text.empty()) {
    at.fail("value for '" + key + "' is not a number: '" + text + "'");
  }
  if (!std::isfinite(parsed)) at.fail("value for '" + key + "' must be finite");
  return parsed;
}

std::uint64_t parse_u64(std::string_view value, const ParseCursor& at, const std::string& key) {
  const std::string text(value);
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    at.fail("value for '" + key + "' is not an unsigned integer: '" + text + "'");
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(text.c_str(), &end, 10);
  if (errno != 0 || end != text.c_str() + text.size()) {
    at.fail("value for '" + key + "' is out of range: '" + text + "'");
  }
  return parsed;
}

std::size_t parse_count(std::string_view value, const ParseCursor& at, const std::string& key) {
  const std::uint64_t parsed = parse_u64(value, at, key);
  if (parsed == 0) at.fail("value for '" + key + "' must be >= 1");
  if (parsed > 1000000000) at.fail("value for '" + key + "' is implausibly large");
  return static_cast<std::size_t>(parsed);
}

bool parse_bool(std::string_view value, const ParseCursor& at, const std::string& key) {
  if (value == "true") return true;
  if (value == "false") return false;
  at.fail("value for '" + key + "' must be true or false");
}

// "HxW" image size, e.g. 32x32.
std::pair<int, int> parse_size(std::string_view value, const ParseCursor& at,
                               const std::string& key) {
  const std::size_t x = value.find('x');
  if (x == std::string_view::npos) at.fail("value for '" + key + "' must look like 32x32");
  const std::uint64_t h = parse_u64(trim(value.substr(0, x)), at, key);
  const std::uint64_t w = parse_u64(trim(value.substr(x + 1)), at, key);
  if (h == 0 || w == 0 || h > 4096 || w > 4096) at.fail("image size out of range for '" + key + "'");
  return {static_cast<int>(h), static_cast<int>(w)};
}

}  // namespace

ExperimentConfig::ExperimentConfig() : space_params(SearchSpace::standard().params()) {}

ExperimentConfig parse_config_text(std::string_view text, const std::string& source_name) {
  ExperimentConfig config;
  ParseCursor at{source_name};
  std::string section;  // "" until the first [header]
  int space_param = -1;  // index into space_params while inside [search_space.*]

  std::istringstream stream{std::string(text)};
  std::string raw;
  while (std::getline(stream, raw)) {
    ++at.line;
    std::string_view line = raw;
    if (const std::size_t comment = line.find_first_of("#;"); comment != std::string_view::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') at.fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      space_param = -1;
      if (section.starts_with("search_space.")) {
        const std::string param = section.substr(std::string("search_space.").size());
        for (std::size_t i = 0; i < config.space_params.size(); ++i) {
          if (config.space_params[i].name == param) space_param = static_cast<int>(i);
        }
        if (space_param < 0) at.fail("unknown search-space parameter '" + param + "'");
      } else if (section != "pso" && section != "woa" && section != "objective" &&
                 section != "output" && section != "hyperparams") {
        at.fail("unknown section [" + section + "]");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) at.fail("expected 'key = value'");
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) at.fail("missing key before '='");
    if (value.empty()) at.fail("missing value for '" + key + "'");

    if (section.empty()) {
      if (key == "algorithm") {
        if (value != "pso" && value != "woa" && value != "both") {
          at.fail("algorithm must be pso, woa, or both");
        }
        config.algorithm = std::string(value);
      } else if (key == "seed") {
        config.seed = parse_u64(value, at, key);
      } else if (key == "equal_budget") {
        config.equal_budget = parse_bool(value, at, key);
      } else {
        at.fail("unknown key '" + key + "' before any section header");
      }
    } else if (space_param >= 0) {
      ParamSpec& spec = config.space_params[static_cast<std::size_t>(space_param)];
      if (key == "kind") {
        if (value == "integer") {
          spec.kind = ParamKind::Integer;
        } else if (value == "continuous") {
          spec.kind = ParamKind::Continuous;
        } else {
          at.fail("kind must be integer or continuous");
        }
      } else if (key == "lower") {
        spec.lower = parse_real(value, at, key);
      } else if (key == "upper") {
        spec.upper = parse_real(value, at, key);
      } else {
        at.fail("unknown key '" + key + "' in section [" + section + "]");
      }
    } else if (section == "pso") {
      if (key == "swarm_size") {
        config.pso.swarm_size = parse_count(value, at, key);
      } else if (key == "iterations") {
        config.pso.iterations = parse_count(value, at, key);
      } else if (key == "inertia_w") {
        config.pso.inertia_w = parse_real(value, at, key);
      } else if (key == "cognitive_c1") {
        config.pso.cognitive_c1 = parse_real(value, at, key);
      } else if (key == "social_c2") {
        config.pso.social_c2 = parse_real(value, at, key);
      } else if (key == "seed") {
        config.pso.seed = parse_u64(value, at, key);
        config.pso_seed_set = true;
      } else if (key == "per_dimension_r") {
        config.pso.per_dimension_r = parse_bool(value, at, key);
      } else {
        at.fail("unknown key '" + key + "' in section [pso]");
      }
    } else if (section == "woa") {
      if (key == "population_size") {
        config.woa.population_size = parse_count(value, at, key);
      } else if (key == "iterations") {
        config.woa.iterations = parse_count(value, at, key);
      } else if (key == "spiral_b") {
        config.woa.spiral_b = parse_real(value, at, key);
      } else if (key == "seed") {
        config.woa.seed = parse_u64(value, at, key);
        config.woa_seed_set = true;
      } else if (key == "literal_spiral") {
        config.woa.literal_spiral = parse_bool(value, at, key);
      } else {
        at.fail("unknown key '" + key + "' in section [woa]");
      }
    } else if (section == "objective") {
      if (key == "type") {
        if (value != "sphere" && value != "rastrigin" && value != "rosenbrock" && value != "cnn") {
          at.fail("objective type must be sphere, rastrigin, rosenbrock, or cnn");
        }
        config.objective.type = std::string(value);
      } else if (key == "dataset") {
        config.objective.dataset = std::string(value);
      } else if (key == "per_class") {
        config.objective.per_class = parse_count(value, at, key);
      } else if (key == "image_size") {
        const auto [h, w] = parse_size(value, at, key);
        config.objective.image_height = h;
        config.objective.image_width = w;
      } else if (key == "dataset_seed") {
        config.objective.dataset_seed = parse_u64(value, at, key);
      } else if (key == "eval_epochs") {
        config.objective.eval_epochs = parse_count(value, at, key);
      } else if (key == "batch_size") {
        config.objective.batch_size = parse_count(value, at, key);
      } else if (key == "final_epochs") {
        config.objective.final_epochs = parse_count(value, at, key);
      } else if (key == "objective_seed") {
        config.objective.objective_seed = parse_u64(value, at, key);
      } else {
        at.fail("unknown key '" + key + "' in section [objective]");
      }
    } else if (section == "output") {
      if (key == "dir") {
        config.output_dir = std::string(value);
      } else {
        at.fail("unknown key '" + key + "' in section [output]");
      }
    } else {  // hyperparams
      if (key == "num_filters") {
        config.hyperparams.num_filters = static_cast<int>(parse_count(value, at, key));
      } else if (key == "dense_units") {
        config.hyperparams.dense_units = static_cast<int>(parse_count(value, at, key));
      } else if (key == "dropout_rate") {
        config.hyperparams.dropout_rate = parse_real(value, at, key);
      } else if (key == "learning_rate") {
        config.hyperparams.learning_rate = parse_real(value, at, key);
      } else {
        at.fail("unknown key '" + key + "' in section [hyperparams]");
      }
    }
  }
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path.string());
}

void finalize_config(ExperimentConfig& config) {
  // SearchSpace's constructor performs the bound/kind validation and names
  // the offending parameter in its diagnostics.
  const SearchSpace space(config.space_params);

  if (!config.pso_seed_set) config.pso.seed = mix_seed(config.seed, kPsoSeedStream);
  if (!config.woa_seed_set) config.woa.seed = mix_seed(config.seed, kWoaSeedStream);

  if (config.equal_budget && config.algorithm == "both") {
    // Raise the smaller side's iteration count until the evaluation budgets
    // size*(1+iterations) match as closely as integer iteration counts allow.
    const std::size_t pso_budget = config.pso.swarm_size * (1 + config.pso.iterations);
    const std::size_t woa_budget = config.woa.population_size * (1 + config.woa.iterations);
    const std::size_t target = std::max(pso_budget, woa_budget);
    auto lifted_iterations = [target](std::size_t size) {
      const std::size_t rounds = (target + size - 1) / size;  // ceil(target/size)
      return std::max<std::size_t>(rounds - 1, 1);
    };
    if (pso_budget < woa_budget) {
      config.pso.iterations = lifted_iterations(config.pso.swarm_size);
    } else if (woa_budget < pso_budget) {
      config.woa.iterations = lifted_iterations(config.woa.population_size);
    }
  }

  if (config.objective.type == "cnn") {
    if (space.size() != 4) {
      throw ConfigError("cnn objective needs the four-parameter hyperparameter space");
    }
    // Decoded candidates feed straight into model construction, so the bounds
    // themselves must describe trainable models.
    const auto& params = space.params();
    if (params[0].lower < 1.0) throw ConfigError("num_filters: lower bound must be >= 1");
    if (params[1].lower < 1.0) throw ConfigError("dense_units: lower bound must be >= 1");
    if (params[2].lower < 0.0 || params[2].upper >= 1.0) {
      throw ConfigError("dropout_rate: bounds must lie inside [0,1)");
    }
    if (config.objective.image_height % 2 != 0 || config.objective.image_width % 2 != 0) {
      throw ConfigError("image_size: dimensions must be even");
    }
    if (config.objective.per_class < 2) throw ConfigError("per_class: must be >= 2");
  }

  if (!(config.hyperparams.dropout_rate >= 0.0 && config.hyperparams.dropout_rate < 1.0)) {
    throw ConfigError("hyperparams.dropout_rate: must lie inside [0,1)");
  }
  if (!std::isfinite(config.hyperparams.learning_rate)) {
    throw ConfigError("hyperparams.learning_rate: must be finite");
  }
  if (config.hyperparams.num_filters < 1 || config.hyperparams.dense_units < 1) {
    throw ConfigError("hyperparams: layer sizes must be >= 1");
  }
  if (config.output_dir.empty()) throw ConfigError("output.dir: must not be empty");
}

SearchSpace config_space(const ExperimentConfig& config) { return SearchSpace(config.space_params); }

}  // namespace swarmtune
