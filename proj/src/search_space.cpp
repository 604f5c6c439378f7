#include "swarmtune/search_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "swarmtune/errors.hpp"

namespace swarmtune {

namespace {

bool is_whole(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

SearchSpace::SearchSpace(std::vector<ParamSpec> params) : params_(std::move(params)) {
  if (params_.empty()) {
    throw ConfigError("search space needs at least one parameter");
  }
  std::set<std::string> seen;
  for (const auto& p : params_) {
    if (p.name.empty()) {
      throw ConfigError("search space parameter with empty name");
    }
    if (!seen.insert(p.name).second) {
      throw ConfigError("duplicate search space parameter: " + p.name);
    }
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper)) {
      throw ConfigError(p.name + ": bounds must be finite");
    }
    if (p.lower > p.upper) {
      std::ostringstream msg;
      msg << p.name << ": lower (" << p.lower << ") exceeds upper (" << p.upper << ")";
      throw ConfigError(msg.str());
    }
    if (p.kind == ParamKind::Integer && (!is_whole(p.lower) || !is_whole(p.upper))) {
      throw ConfigError(p.name + ": integer parameter bounds must be whole numbers");
    }
  }
}

SearchSpace SearchSpace::standard() {
  return SearchSpace({
      {"num_filters", ParamKind::Integer, 8.0, 32.0},
      {"dense_units", ParamKind::Integer, 32.0, 128.0},
      {"dropout_rate", ParamKind::Continuous, 0.1, 0.5},
      {"learning_rate", ParamKind::Continuous, 1e-4, 1e-2},
  });
}

void SearchSpace::check_dimension(const Position& pos) const {
  if (pos.size() != params_.size()) {
    std::ostringstream msg;
    msg << "position has " << pos.size() << " coordinates, space has " << params_.size();
    throw DimensionError(msg.str());
  }
}

Position SearchSpace::sample(Rng& rng) const {
  Position pos(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    pos[i] = rng.uniform(params_[i].lower, params_[i].upper);
  }
  return pos;
}

Position SearchSpace::clip(const Position& pos) const {
  check_dimension(pos);
  Position out(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    out[i] = std::min(params_[i].upper, std::max(params_[i].lower, pos[i]));
  }
  return out;
}

bool SearchSpace::contains(const Position& pos) const {
  check_dimension(pos);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (pos[i] < params_[i].lower || pos[i] > params_[i].upper) return false;
  }
  return true;
}

std::vector<double> SearchSpace::decode_values(const Position& pos) const {
  if (!contains(pos)) {
    throw DomainError("position outside bounds; clip before decoding");
  }
  std::vector<double> out(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    out[i] = params_[i].kind == ParamKind::Integer ? std::round(pos[i]) : pos[i];
  }
  return out;
}

HyperParams SearchSpace::decode(const Position& pos) const {
  if (params_.size() != 4) {
    throw DimensionError("typed decoding needs the standard four-parameter space");
  }
  const auto values = decode_values(pos);
  HyperParams hp;
  hp.num_filters = static_cast<int>(std::llround(values[0]));
  hp.dense_units = static_cast<int>(std::llround(values[1]));
  hp.dropout_rate = values[2];
  hp.learning_rate = values[3];
  return hp;
}

Position SearchSpace::encode(const HyperParams& hp) const {
  if (params_.size() != 4) {
    throw DimensionError("typed encoding needs the standard four-parameter space");
  }
  Position pos = {static_cast<double>(hp.num_filters), static_cast<double>(hp.dense_units),
                  hp.dropout_rate, hp.learning_rate};
  if (!contains(pos)) {
    throw DomainError("hyperparameters outside the space bounds");
  }
  return pos;
}

}  // namespace swarmtune
